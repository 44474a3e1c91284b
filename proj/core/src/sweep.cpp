#include "kgl/sweep.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "kgl/gl4.hpp"
#include "kgl/kloosterman.hpp"
#include "kgl/orbital.hpp"

namespace kgl {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

long long now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::vector<long long> int_list(const json& j, const std::string& key,
                                std::vector<long long> fallback) {
    if (!j.contains(key)) return fallback;
    std::vector<long long> out;
    for (const auto& v : j.at(key)) out.push_back(v.get<long long>());
    return out;
}

NuParam parse_nu(const std::string& text) {
    NuParam nu;
    auto slash = text.find('/');
    if (slash == std::string::npos) {
        nu.num = std::stoll(text);
        nu.den_exp = 0;
        return nu;
    }
    // "k/d": d must be a prime power of the sweep prime; parsed as exponent later
    throw ConfigError("nu literals with denominators must use {\"num\":k,\"den_exp\":e}");
}

NuParam parse_nu_json(const json& v) {
    if (v.is_string()) return parse_nu(v.get<std::string>());
    if (v.is_number_integer()) return NuParam{v.get<long long>(), 0};
    if (v.is_object()) return NuParam{v.at("num").get<long long>(), v.at("den_exp").get<int>()};
    throw ConfigError("bad nu literal");
}

std::vector<NuParam> nu_list(const json& j, const std::string& key) {
    std::vector<NuParam> out;
    if (!j.contains(key)) {
        out.push_back(NuParam{1, 0});
        return out;
    }
    for (const auto& v : j.at(key)) out.push_back(parse_nu_json(v));
    return out;
}

std::vector<std::vector<long long>> exponent_tuples(const json& j, int slots) {
    std::vector<std::vector<long long>> out;
    if (j.contains("a_tuples")) {
        for (const auto& t : j.at("a_tuples")) {
            std::vector<long long> a;
            for (const auto& v : t) a.push_back(v.get<long long>());
            if (static_cast<int>(a.size()) == slots) out.push_back(std::move(a));
        }
        return out;
    }
    std::vector<long long> values = int_list(j, "a_values", {1, 2});
    std::vector<long long> cur(static_cast<std::size_t>(slots));
    std::function<void(int)> rec = [&](int i) {
        if (i == slots) {
            out.push_back(cur);
            return;
        }
        for (long long v : values) {
            cur[static_cast<std::size_t>(i)] = v;
            rec(i + 1);
        }
    };
    if (slots > 0) rec(0);
    return out;
}

// decomposable cocharacters of GL(n) with all prefix sums in [0, height]
std::vector<Cocharacter> cochars_up_to(int n, long long height) {
    std::vector<Cocharacter> out;
    std::vector<long long> prefix(static_cast<std::size_t>(n - 1));
    std::function<void(int)> rec = [&](int i) {
        if (i == n - 1) {
            Cocharacter lam(static_cast<std::size_t>(n));
            long long prev = 0;
            for (int k = 0; k + 1 < n; ++k) {
                lam[static_cast<std::size_t>(k)] = prefix[static_cast<std::size_t>(k)] - prev;
                prev = prefix[static_cast<std::size_t>(k)];
            }
            lam[static_cast<std::size_t>(n - 1)] = -prev;
            out.push_back(std::move(lam));
            return;
        }
        for (long long s = 0; s <= height; ++s) {
            prefix[static_cast<std::size_t>(i)] = s;
            rec(i + 1);
        }
    };
    if (n >= 2) rec(0);
    return out;
}

struct RowTimer {
    BoundReportRow& row;
    long long t0 = now_ms();
    explicit RowTimer(BoundReportRow& r) : row(r) {}
    ~RowTimer() { row.elapsed_ms = now_ms() - t0; }
};

} // namespace

int SweepReport::exit_code() const {
    if (fail > 0) return 1;
    if (skipped > 0) return 3;
    return 0;
}

SweepReport run_sweep(const std::string& check, const std::string& config_json_text) {
    json cfg;
    try {
        cfg = json::parse(config_json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad config JSON: ") + e.what());
    }
    if (cfg.contains("check") && cfg.at("check").get<std::string>() != check)
        throw ConfigError("config 'check' field disagrees with the requested check");

    SweepReport rep;
    rep.check = check;
    EnumerationOptions opt;
    opt.budget = cfg.value("budget", 100'000'000ll);
    opt.threads = cfg.value("threads", 1);

    auto account = [&](BoundReportRow row) {
        if (row.path == "skipped") {
            ++rep.skipped;
        } else if (row.ok) {
            ++rep.pass;
        } else {
            ++rep.fail;
        }
        if (row.has_bound) rep.max_ratio = std::max(rep.max_ratio, row.ratio);
        rep.rows.push_back(std::move(row));
    };

    std::vector<long long> ps = int_list(cfg, "p", {2, 3});
    std::vector<long long> ms = int_list(cfg, "m", {1});

    if (check == "stevens") {
        std::vector<long long> ns = int_list(cfg, "n", {2, 3});
        for (long long n : ns)
            for (long long p : ps)
                for (long long m : ms)
                    for (const auto& a : exponent_tuples(cfg, static_cast<int>(n) - 1)) {
                        BoundReportRow row;
                        row.p = static_cast<std::uint64_t>(p);
                        row.m = static_cast<int>(m);
                        row.n = static_cast<int>(n);
                        row.a = a;
                        row.path = "generic";
                        RowTimer t(row);
                        try {
                            CellSpec spec = CellSpec::make(row.p, row.n, row.m, a);
                            auto cell = enumerate_cell(spec, opt);
                            row.cell_size = cell.size();
                            row.magnitude = kloosterman_sum_of(spec, cell).magnitude();
                            row.ok = stevens_identity_check(spec, opt);
                        } catch (const Infeasible&) {
                            row.path = "skipped";
                        }
                        account(std::move(row));
                    }
    } else if (check == "weil") {
        std::vector<long long> ls = int_list(cfg, "l", {0, 1, 2, 3});
        auto nus = nu_list(cfg, "nu");
        auto nups = nu_list(cfg, "nu_prime");
        for (long long p : ps)
            for (long long m : ms)
                for (long long l : ls)
                    for (const auto& nu : nus)
                        for (const auto& nup : nups) {
                            BoundReportRow row;
                            row.p = static_cast<std::uint64_t>(p);
                            row.m = static_cast<int>(m);
                            row.n = 2;
                            row.a = {l};
                            row.path = "s2";
                            row.nu_echo = std::to_string(nu.num) +
                                          (nu.den_exp ? ":" + std::to_string(nu.den_exp) : "");
                            row.nu_prime_echo =
                                std::to_string(nup.num) +
                                (nup.den_exp ? ":" + std::to_string(nup.den_exp) : "");
                            RowTimer t(row);
                            PrimeContext ctx(row.p,
                                             working_precision(2, l + std::abs(nu.den_exp), row.m),
                                             root_order(l, row.m));
                            CycloSum s2 = s2_restricted(nu, nup, l, row.m, ctx);
                            row.cell_size = ctx.p_pow(static_cast<int>(l));
                            row.magnitude = s2.magnitude();
                            row.has_bound = true;
                            row.bound = weil_bound(nu, nup, l, row.m, row.p);
                            row.ratio = row.magnitude / row.bound;
                            row.ok = row.magnitude <= row.bound + 1e-6;
                            account(std::move(row));
                        }
    } else if (check == "dr") {
        std::vector<long long> ns = int_list(cfg, "n", {2, 3});
        long long height = cfg.value("height", 3ll);
        for (long long n : ns)
            for (long long p : ps)
                for (const auto& lam : cochars_up_to(static_cast<int>(n), height)) {
                    BoundReportRow row;
                    row.p = static_cast<std::uint64_t>(p);
                    row.m = 0;
                    row.n = static_cast<int>(n);
                    row.a = lam;
                    row.path = "generic";
                    RowTimer t(row);
                    try {
                        TorusDiag a;
                        a.exponents = lam;
                        a.units.assign(lam.size(), 1);
                        BigRational dr = orbital_integral_DR(a, row.p);
                        std::uint64_t bf = orbital_bruteforce(a, row.p, opt.budget);
                        row.cell_size = bf;
                        row.magnitude = static_cast<double>(dr);
                        row.ok = (dr == BigRational(bf));
                    } catch (const Infeasible&) {
                        row.path = "skipped";
                    }
                    account(std::move(row));
                }
    } else if (check == "thm-wn") {
        std::vector<long long> ns = int_list(cfg, "n", {3});
        for (long long n : ns)
            for (long long p : ps)
                for (long long m : ms) {
                    auto thr = thm_wn_nontriviality_threshold(
                        static_cast<int>(n), static_cast<std::uint64_t>(p), static_cast<int>(m));
                    rep.thresholds["n=" + std::to_string(n) + ",p=" + std::to_string(p) +
                                   ",m=" + std::to_string(m)] = thr ? *thr : -1;
                    for (const auto& a : exponent_tuples(cfg, static_cast<int>(n) - 1)) {
                        BoundReportRow row;
                        row.p = static_cast<std::uint64_t>(p);
                        row.m = static_cast<int>(m);
                        row.n = static_cast<int>(n);
                        row.a = a;
                        row.path = "generic";
                        RowTimer t(row);
                        try {
                            CellSpec spec = CellSpec::make(row.p, row.n, row.m, a);
                            auto cell = enumerate_cell(spec, opt);
                            row.cell_size = cell.size();
                            row.magnitude = kloosterman_sum_of(spec, cell).magnitude();
                            row.has_bound = true;
                            row.bound = bound_thm_wn(spec);
                            row.ratio = row.magnitude / row.bound;
                            row.ok = row.magnitude <= row.bound;
                        } catch (const Infeasible&) {
                            row.path = "skipped";
                        }
                        account(std::move(row));
                    }
                }
    } else if (check == "thm-w8") {
        for (long long p : ps)
            for (long long m : ms)
                for (const auto& a : exponent_tuples(cfg, 3)) {
                    BoundReportRow row;
                    row.p = static_cast<std::uint64_t>(p);
                    row.m = static_cast<int>(m);
                    row.n = 4;
                    row.a = a;
                    row.path = "gl4_fast";
                    RowTimer t(row);
                    try {
                        CellSpec spec = CellSpec::make(row.p, 4, row.m, a);
                        auto fast = kloosterman_gl4_fast_full(spec, opt);
                        row.cell_size = fast.cell_size;
                        row.magnitude = fast.sum.magnitude();
                        row.has_bound = true;
                        row.bound = bound_thm_w8(spec);
                        row.ratio = row.magnitude / row.bound;
                        row.ok = row.magnitude <= row.bound;
                    } catch (const Infeasible&) {
                        row.path = "skipped";
                    }
                    account(std::move(row));
                }
    } else if (check == "gl4-dual") {
        for (long long p : ps)
            for (long long m : ms)
                for (const auto& a : exponent_tuples(cfg, 3)) {
                    BoundReportRow row;
                    row.p = static_cast<std::uint64_t>(p);
                    row.m = static_cast<int>(m);
                    row.n = 4;
                    row.a = a;
                    row.path = "gl4_fast";
                    RowTimer t(row);
                    try {
                        CellSpec spec = CellSpec::make(row.p, 4, row.m, a);
                        auto fast = kloosterman_gl4_fast_full(spec, opt);
                        auto cell = enumerate_cell(spec, opt);
                        CycloSum generic = kloosterman_sum_of(spec, cell);
                        row.cell_size = fast.cell_size;
                        row.magnitude = generic.magnitude();
                        std::vector<std::vector<std::uint64_t>> gkeys;
                        gkeys.reserve(cell.size());
                        const int ell = static_cast<int>(spec.ell());
                        for (const auto& x : cell) gkeys.push_back(x.key(ell, row.m));
                        row.ok = fast.sum.equals(generic) && fast.keys == gkeys;
                    } catch (const Infeasible&) {
                        row.path = "skipped";
                    }
                    account(std::move(row));
                }
    } else {
        throw ConfigError("unknown check: " + check);
    }
    return rep;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string report_to_json(const SweepReport& rep) {
    ordered_json j;
    j["check"] = rep.check;
    if (rep.check == "weil") j["constants"] = {{"c_m", "p^(m/2)"}};
    if (!rep.thresholds.empty()) {
        ordered_json t;
        for (const auto& [k, v] : rep.thresholds) t[k] = v;
        j["nontriviality_thresholds"] = std::move(t);
    }
    j["summary"] = {{"points", rep.rows.size()},
                    {"pass", rep.pass},
                    {"fail", rep.fail},
                    {"skipped", rep.skipped},
                    {"max_ratio", rep.max_ratio}};
    j["rows"] = ordered_json::array();
    for (const auto& r : rep.rows) {
        ordered_json row;
        row["p"] = r.p;
        row["m"] = r.m;
        row["n"] = r.n;
        row["a"] = r.a;
        if (!r.nu_echo.empty()) {
            row["nu"] = r.nu_echo;
            row["nu_prime"] = r.nu_prime_echo;
        }
        row["cell_size"] = r.cell_size;
        row["magnitude"] = r.magnitude;
        if (r.has_bound) {
            row["bound"] = r.bound;
            row["ratio"] = r.ratio;
        } else {
            row["bound"] = nullptr;
            row["ratio"] = nullptr;
        }
        row["ok"] = r.ok;
        row["path"] = r.path;
        row["elapsed_ms"] = r.elapsed_ms;
        j["rows"].push_back(std::move(row));
    }
    return j.dump(2);
}

std::string report_to_csv(const SweepReport& rep) {
    std::ostringstream os;
    os << "p,m,n,a,magnitude,bound,ratio,cell_size,path,elapsed_ms\n";
    for (const auto& r : rep.rows) {
        os << r.p << "," << r.m << "," << r.n << ",";
        for (std::size_t i = 0; i < r.a.size(); ++i) {
            if (i) os << "+";
            os << r.a[i];
        }
        os << "," << format_double(r.magnitude) << ",";
        if (r.has_bound) os << format_double(r.bound);
        os << ",";
        if (r.has_bound) os << format_double(r.ratio);
        os << "," << r.cell_size << "," << r.path << "," << r.elapsed_ms << "\n";
    }
    return os.str();
}

} // namespace kgl
