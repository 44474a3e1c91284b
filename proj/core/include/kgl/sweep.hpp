#pragma once

#include <map>
#include <string>
#include <vector>

#include "kgl/bounds.hpp"

namespace kgl {

// Outcome of one `check` run over a parameter grid.
struct SweepReport {
    std::string check;
    std::vector<BoundReportRow> rows;
    // thm-wn only: per-(n,p,m) diagonal height beyond which the bound beats
    // the trivial one (see thm_wn_nontriviality_threshold)
    std::map<std::string, long long> thresholds;
    int pass = 0;
    int fail = 0;
    int skipped = 0; // per-point Infeasible, recorded with path = "skipped"
    double max_ratio = 0.0;

    int exit_code() const; // 0 pass, 1 failure, 3 budget skips (no failures)
};

// Execute the named check over the cartesian grid in the JSON config text.
// Config keys (all optional unless a check needs them):
//   p, m, n: integer arrays; a_values: exponents filled cartesian per slot;
//   a_tuples: explicit exponent tuples; l: ell values (weil);
//   nu, nu_prime: arrays of rationals "k" or "k/d" (weil);
//   height: max prefix height (dr); budget, threads.
SweepReport run_sweep(const std::string& check, const std::string& config_json_text);

std::string report_to_json(const SweepReport& rep);
std::string report_to_csv(const SweepReport& rep);

// Stable float formatting shared by the report writers (CSV determinism).
std::string format_double(double v);

} // namespace kgl
