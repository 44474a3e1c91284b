#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kgl/cell.hpp"

namespace kgl {

using BoundInt = boost::multiprecision::cpp_int;
using BoundRational = boost::multiprecision::cpp_rational;

// One sweep-report line: spec echo, measured magnitude, bound and ratio when
// the check is a proved bound, identity outcome otherwise.
struct BoundReportRow {
    std::uint64_t p = 0;
    int m = 0;
    int n = 0;
    std::vector<long long> a;
    std::string nu_echo;       // character parameters when they matter
    std::string nu_prime_echo;
    std::uint64_t cell_size = 0;
    double magnitude = 0.0;
    bool has_bound = false;
    double bound = 0.0;
    double ratio = 0.0;
    bool ok = true;
    std::string path; // generic | gl4_fast | s2 | skipped
    long long elapsed_ms = 0;
};

// Refined Weil bound for the restricted GL(2) sum:
//   (ell+m+1) C_m gcd(|p^m nu|^-1, |p^m nu'|^-1, p^{ell+m})^{1/2} p^{(ell+m)/2},
// with C_m = p^{m/2}. Exact integer p-powers inside, float at the boundary.
double weil_bound(const NuParam& nu, const NuParam& nu_prime, long long ell, int m,
                  std::uint64_t p);

// 1 - 1/(4n^2 - 18n + 22), the nontrivial exponent factor (n >= 3).
BoundRational thm_wn_exponent_factor(int n);

// C_n constant of the longest-element bound.
double thm_wn_constant(int n, std::uint64_t p, int m, long long ell);

// Longest-element bound for n >= 3: min of the two-sided min-form and the
// uniform (1 - 1/(4n^2-18n+22))-form.
double bound_thm_wn(const CellSpec& spec);

// C_8 constant and the sharper GL(4) bound (min-form and 7/8-form).
double thm_w8_constant(std::uint64_t p, int m, long long ell, long long rho, long long r,
                       long long sigma);
double bound_thm_w8(const CellSpec& spec);

// General-character constants D_n / D_8 with the per-slot gcd factors
// (|nu_j nu'_{n-j} p^{2m}|^-1, p^{ell+m})^{1/2}; same exponent structure.
double bound_general_nu(const CellSpec& spec);

// p^{e_num / e_den} with exact integer part (helper shared by the bounds).
double p_pow_frac(std::uint64_t p, long long e_num, long long e_den);

// Smallest t on the diagonal ray a = (t,...,t) from which the longest-element
// bound stays below the trivial bound p^{(1+eps) sum a_i}; nullopt when no
// such t is found within the scan range. The polynomial constants make the
// bound trivial at desk scale, so the threshold is reported, never asserted
// to be small.
std::optional<long long> thm_wn_nontriviality_threshold(int n, std::uint64_t p, int m,
                                                        double eps = 0.01,
                                                        long long max_scan = 4000);

// Rows of |K_e^{w_{G_n}}(c)| Delta^{1/2-delta}(c) along an exponent ray;
// report only, no asymptotic assertion is made. magnitude carries the product;
// bound stays empty.
std::vector<BoundReportRow> germ_decay_sweep(const CellSpec& tmpl, double delta,
                                             const std::vector<std::vector<long long>>& ray);

} // namespace kgl
