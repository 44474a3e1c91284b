#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "kgl/bounds.hpp"
#include "kgl/kloosterman.hpp"
#include "kgl/sweep.hpp"

using namespace kgl;

TEST_CASE("weil bound plug-in values") {
    NuParam one{1, 0};
    // p=3, m=1, l=1: 3 * sqrt3 * sqrt3 * 3 = 27
    CHECK(weil_bound(one, one, 1, 1, 3) == doctest::Approx(27.0).epsilon(1e-12));
    // l=0, m=1, p=2: 2 * sqrt2 * sqrt2 * sqrt2 = 4 sqrt2
    CHECK(weil_bound(one, one, 0, 1, 2) == doctest::Approx(4.0 * std::sqrt(2.0)).epsilon(1e-12));
    // gcd saturation: v(nu) = v(nu') = m caps the gcd at p^{l+m} for l <= m
    NuParam pm{9, 0}; // 9 = 3^2, m=2: |nu| = p^{-m}
    double b = weil_bound(pm, pm, 1, 2, 3);
    // (l+m+1) p^{m/2} p^{(l+m)/2} p^{(l+m)/2} with gcd = p^{min(2m+... )} = p^{l+m}
    CHECK(b == doctest::Approx(4.0 * std::pow(3.0, 1.0 + 3.0)).epsilon(1e-12));
}

TEST_CASE("S_2 obeys the weil bound on a grid") {
    NuParam one{1, 0};
    for (std::uint64_t p : {2ull, 3ull, 5ull})
        for (int m : {1, 2})
            for (long long l = 0; l <= 4; ++l) {
                PrimeContext ctx(p, working_precision(2, l + m, m), root_order(l, m));
                double s2 = s2_restricted(one, one, l, m, ctx).magnitude();
                CHECK(s2 <= weil_bound(one, one, l, m, p) + 1e-6);
            }
}

TEST_CASE("nontrivial exponent factors") {
    CHECK(thm_wn_exponent_factor(3) == BoundRational(3, 4));
    CHECK(thm_wn_exponent_factor(4) == BoundRational(13, 14));
}

TEST_CASE("C_8 constant values") {
    // closed formula at ell = rho = sigma = r = 1, m = 1, p = 2:
    // 8 * 2^12 * 3^3 * 3 * 3^2 * 3^2 = 2^15 * 3^8
    CHECK(thm_w8_constant(2, 1, 1, 1, 1, 1) == doctest::Approx(214990848.0));
    // degenerate offsets reproduce the 2^23 plug-in arithmetic
    CHECK(thm_w8_constant(2, 1, 0, 0, 0, 0) == doctest::Approx(8388608.0));
}

TEST_CASE("w8 min-form exponents at the balanced point") {
    // (t,r,s)=(1,1,1): min(r+sigma+rho/2, rho+3sigma/2+r/2) + 3m = 2.5+3m <= 2.625+3m
    CellSpec spec = CellSpec::make(2, 4, 1, {1, 1, 1});
    double c8 = thm_w8_constant(2, 1, 1, 1, 1, 1);
    double minform = c8 * std::pow(2.0, 2.5 + 3.0);
    CHECK(bound_thm_w8(spec) == doctest::Approx(minform).epsilon(1e-12));
    double seven8 = c8 * std::pow(2.0, 7.0 * 3.0 / 8.0 + 3.0);
    CHECK(minform <= seven8);
}

TEST_CASE("unit character parameters collapse D_n to the C_n bound") {
    CellSpec s3 = CellSpec::make(3, 3, 1, {2, 1});
    CHECK(bound_general_nu(s3) == doctest::Approx(bound_thm_wn(s3)).epsilon(1e-12));
    CellSpec s4 = CellSpec::make(2, 4, 1, {1, 2, 1});
    CHECK(bound_general_nu(s4) == doctest::Approx(bound_thm_w8(s4)).epsilon(1e-12));
}

TEST_CASE("general-nu gcd factors saturate at p^{l+m} when l <= 3m") {
    // v(nu_j) = v(nu'_{n-j}) = m: each factor min(4m, l+m) = l+m
    CellSpec spec = CellSpec::make(3, 3, 1, {2, 2});
    for (auto& v : spec.nu) v = NuParam{3, 0};       // 3 = p^1, valuation m = 1
    for (auto& v : spec.nu_prime) v = NuParam{3, 0};
    double with_sat = bound_general_nu(spec);
    CellSpec unit = CellSpec::make(3, 3, 1, {2, 2});
    // relative to unit nu: each of the two factors grows from p^{min(2m,l+m)/2} = p^1
    // to p^{min(4m,l+m)/2} = p^{3/2}
    CHECK(with_sat == doctest::Approx(bound_general_nu(unit) * 3.0).epsilon(1e-12));
}

TEST_CASE("thm-wn bound dominates |Kl| on a spot grid") {
    for (std::uint64_t p : {2ull, 3ull}) {
        CellSpec spec = CellSpec::make(p, 3, 1, {1, 1});
        CHECK(kloosterman_sum(spec).magnitude() <= bound_thm_wn(spec));
    }
}

TEST_CASE("germ decay rows") {
    CellSpec tmpl = CellSpec::make(3, 2, 1, {1}, {1, -1});
    auto rows = germ_decay_sweep(tmpl, 0.05, {{1}, {2}, {3}});
    REQUIRE(rows.size() == 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        long long a = static_cast<long long>(i) + 1;
        CellSpec s = tmpl;
        s.a = {a};
        double kl = kloosterman_sum(s).magnitude();
        double expect = (kl / 3.0) * std::pow(3.0, -(1.0 - 0.1) * a);
        CHECK(rows[i].magnitude == doctest::Approx(expect).epsilon(1e-9));
        CHECK_FALSE(rows[i].has_bound); // report only
    }
    CHECK_THROWS_AS(germ_decay_sweep(tmpl, 0.3, {{1}}), ConfigError); // cap is 1/4 at n=2
    // empty-cell ray point reports magnitude 0
    CellSpec t4 = CellSpec::make(2, 4, 1, {1, 1, 1});
    auto r4 = germ_decay_sweep(t4, 1e-3, {{1, 1, 1}});
    CHECK(r4[0].cell_size == 0);
    CHECK(r4[0].magnitude == 0.0);
}

TEST_CASE("run_sweep: weil grid passes with ratios <= 1") {
    SweepReport rep = run_sweep("weil", R"({"p":[2,3],"m":[1],"l":[0,1,2]})");
    CHECK(rep.fail == 0);
    CHECK(rep.pass == 6);
    CHECK(rep.max_ratio <= 1.0);
    CHECK(rep.exit_code() == 0);
    for (const auto& r : rep.rows) CHECK(r.path == "s2");
}

TEST_CASE("run_sweep: empty grid exits success") {
    SweepReport rep = run_sweep("stevens", R"({"n":[3],"p":[2],"a_tuples":[]})");
    CHECK(rep.rows.empty());
    CHECK(rep.exit_code() == 0);
}

TEST_CASE("run_sweep: stevens and dr smoke grids") {
    SweepReport st = run_sweep("stevens", R"({"n":[2],"p":[2,3],"m":[1],"a_values":[1,2]})");
    CHECK(st.fail == 0);
    CHECK(st.pass == 4);
    SweepReport dr = run_sweep("dr", R"({"n":[2],"p":[2,3],"height":2})");
    CHECK(dr.fail == 0);
    CHECK(dr.pass == 6); // three prefix heights x two primes
}

TEST_CASE("run_sweep: config validation") {
    CHECK_THROWS_AS(run_sweep("weil", "{bad json"), ConfigError);
    CHECK_THROWS_AS(run_sweep("nope", "{}"), ConfigError);
    CHECK_THROWS_AS(run_sweep("weil", R"({"check":"stevens"})"), ConfigError);
}

TEST_CASE("CSV output is deterministic apart from elapsed_ms") {
    auto strip_elapsed = [](const std::string& csv) {
        std::istringstream in(csv);
        std::ostringstream out;
        std::string line;
        while (std::getline(in, line)) {
            auto pos = line.rfind(',');
            out << line.substr(0, pos) << "\n";
        }
        return out.str();
    };
    SweepReport a = run_sweep("weil", R"({"p":[3],"m":[1],"l":[0,1,2,3]})");
    SweepReport b = run_sweep("weil", R"({"p":[3],"m":[1],"l":[0,1,2,3]})");
    CHECK(strip_elapsed(report_to_csv(a)) == strip_elapsed(report_to_csv(b)));
    std::string csv = report_to_csv(a);
    CHECK(csv.rfind("p,m,n,a,magnitude,bound,ratio,cell_size,path,elapsed_ms\n", 0) == 0);
}

TEST_CASE("gl4-dual sweep on the small ladder grid") {
    SweepReport rep = run_sweep(
        "gl4-dual", R"({"p":[2],"m":[1],"a_tuples":[[1,1,1],[1,2,1]]})");
    CHECK(rep.fail == 0);
    CHECK(rep.pass == 2);
}

TEST_CASE("thm-wn beats the trivial bound beyond a reported threshold") {
    for (std::uint64_t p : {2ull, 3ull}) {
        auto t = thm_wn_nontriviality_threshold(3, p, 1);
        REQUIRE(t.has_value());
        INFO("n=3 p=", p, " threshold t=", *t);
        // beyond the threshold the exponent gap only widens
        long long tt = *t;
        double logp = std::log2(static_cast<double>(p));
        for (long long extra : {0ll, 5ll, 50ll}) {
            long long asum = 2 * (tt + extra);
            double log_bound = std::log2(thm_wn_constant(3, p, 1, tt + extra)) +
                               (0.75 * asum + 3.0) * logp;
            CHECK(log_bound < 1.01 * asum * logp);
        }
    }
}
