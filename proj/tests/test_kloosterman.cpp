#include <doctest.h>

#include <algorithm>
#include <set>

#include "kgl/kloosterman.hpp"
#include "kgl/orbital.hpp"

using namespace kgl;

namespace {

CycloSum three_zeta3_sq() {
    CycloSum s(3, 1);
    s.accumulate(2, 3);
    return s;
}

} // namespace

TEST_CASE("anchored GL(2) cell: three elements with inverse-pair entries") {
    CellSpec spec = CellSpec::make(3, 2, 1, {1}, {1, -1});
    PrimeContext ctx = spec.context();
    auto cell = enumerate_cell(spec);
    REQUIRE(cell.size() == 3);
    std::set<std::uint64_t> xkeys, ykeys;
    for (const auto& x : cell) {
        std::uint64_t xk = x.uprime.at(0, 1).class_key(1, 1);
        std::uint64_t yk = x.u.at(0, 1).class_key(1, 1);
        xkeys.insert(xk);
        ykeys.insert(yk);
        CHECK(yk == inv_mod(xk, 9)); // y'' = x''^{-1} mod 9
    }
    CHECK(xkeys == std::set<std::uint64_t>{1, 4, 7});
    CHECK(ykeys == std::set<std::uint64_t>{1, 4, 7});
}

TEST_CASE("infeasible determinant gives the empty cell") {
    CellSpec spec = CellSpec::make(3, 2, 1, {1}, {1, 1}); // det(wc) = -1 not 1 mod 3
    CHECK_FALSE(spec.feasible());
    CHECK(enumerate_cell(spec).empty());
    CHECK(kloosterman_sum(spec).is_zero());
}

TEST_CASE("exponent below the level empties the cell") {
    CellSpec spec = CellSpec::make(3, 2, 1, {0}, {1, -1});
    CHECK(enumerate_cell(spec).empty());
}

TEST_CASE("anchored GL(2) Kloosterman sum is 3 zeta_3^2") {
    CellSpec spec = CellSpec::make(3, 2, 1, {1}, {1, -1});
    CycloSum kl = kloosterman_sum(spec);
    CHECK(kl.equals(three_zeta3_sq()));
    CHECK(kl.magnitude() == doctest::Approx(3.0).epsilon(1e-9)); // |Kl| = |X|
}

TEST_CASE("every emitted element reconstructs into K_m and keys are distinct") {
    for (auto [p, a1, a2] : std::vector<std::tuple<std::uint64_t, long long, long long>>{
             {2, 1, 1}, {2, 2, 1}, {3, 1, 2}}) {
        CellSpec spec = CellSpec::make(p, 3, 1, {a1, a2});
        PrimeContext ctx = spec.context();
        auto cell = enumerate_cell(spec);
        PMatrix wc = weyl_matrix(WeylPerm::longest(3), ctx) * spec.torus().to_matrix(ctx);
        std::set<std::vector<std::uint64_t>> keys;
        for (const auto& x : cell) {
            PMatrix g = x.u.to_matrix() * wc * x.uprime.to_matrix();
            CHECK(in_Km(g, spec.m));
            CHECK(nk_membership(wc * x.uprime.to_matrix(), spec.m));
            // Bruhat extraction round-trips every emitted cell element
            auto [eu, eup] = bruhat_extract(g, WeylPerm::longest(3), spec.torus());
            for (int i = 0; i < 3; ++i)
                for (int j = i + 1; j < 3; ++j) {
                    CHECK(eu.at(i, j).equals_at_precision(x.u.at(i, j)));
                    CHECK(eup.at(i, j).equals_at_precision(x.uprime.at(i, j)));
                }
            keys.insert(x.key(static_cast<int>(spec.ell()), spec.m));
        }
        CHECK(keys.size() == cell.size()); // u' residues pairwise distinct
    }
}

TEST_CASE("accepted set equals the nk_membership filter on the raw grid") {
    // independent completeness check on the full residue grid, GL(2) and GL(3)
    CellSpec s2 = CellSpec::make(3, 2, 1, {2}, {1, -1});
    PrimeContext ctx = s2.context();
    PMatrix wc = weyl_matrix(WeylPerm::longest(2), ctx) * s2.torus().to_matrix(ctx);
    std::set<std::uint64_t> grid_accept;
    for (std::uint64_t k = 0; k < ctx.p_pow(3); ++k) { // p^{-2} Z / p Z
        PMatrix up = PMatrix::identity(2, ctx);
        up.at(0, 1) = Padic::from_scaled(static_cast<long long>(k), 2, ctx);
        if (nk_membership(wc * up, 1)) grid_accept.insert(up.at(0, 1).class_key(2, 1));
    }
    auto cell = enumerate_cell(s2);
    std::set<std::uint64_t> enum_accept;
    for (const auto& x : cell) enum_accept.insert(x.uprime.at(0, 1).class_key(2, 1));
    CHECK(grid_accept == enum_accept);
}

TEST_CASE("s2_restricted examples") {
    PrimeContext ctx3(3, 12, 3);
    NuParam one{1, 0};
    CHECK(s2_restricted(one, one, 0, 1, ctx3).equals(CycloSum::integer(3, 3, 1)));
    CHECK(s2_restricted(one, one, 1, 1, ctx3).equals(three_zeta3_sq()));
    PrimeContext ctx2(2, 12, 3);
    CHECK(s2_restricted(one, one, 1, 1, ctx2).equals(CycloSum::integer(2, 3, 2)));
}

TEST_CASE("twisted decomposition equals the restricted sum") {
    NuParam one{1, 0};
    for (std::uint64_t p : {2ull, 3ull})
        for (int m : {1, 2})
            for (long long l : {0ll, 1ll, 2ll}) {
                PrimeContext ctx(p, working_precision(2, l + m, m), root_order(l, m));
                CycloSum direct = s2_restricted(one, one, l, m, ctx);
                CycloSum twisted = s2_twisted_decomposition(one, one, l, m, ctx);
                CHECK(direct.equals(twisted));
            }
    // nontrivial character parameters
    NuParam third{1, 1}; // 1/p
    PrimeContext ctx(3, 14, 4);
    CHECK(s2_restricted(third, one, 2, 1, ctx).equals(s2_twisted_decomposition(third, one, 2, 1, ctx)));
}

TEST_CASE("twisted decomposition needs p in {2,3}") {
    NuParam one{1, 0};
    PrimeContext ctx(5, 10, 3);
    CHECK_THROWS_AS(s2_twisted_decomposition(one, one, 1, 1, ctx), TwistUnsupported);
}

TEST_CASE("V_w counts") {
    CHECK(v_w_count(0, 1, 4, 3) == 1);
    CHECK(v_w_count(1, 1, 2, 3) == 3);
    CHECK(v_w_count(1, 1, 4, 2) == 8);
    int seen = 0;
    v_w_for_each(1, 1, 2, 3, [&](const std::vector<std::uint64_t>& lam) {
        ++seen;
        CHECK(lam.size() == 1);
        CHECK(lam[0] % 3 == 1);
    });
    CHECK(seen == 3);
}

TEST_CASE("anchored orbit decomposition: one orbit of size 3") {
    CellSpec spec = CellSpec::make(3, 2, 1, {1}, {1, -1});
    auto od = orbit_decompose(spec);
    REQUIRE(od.representatives.size() == 1);
    CHECK(od.orbit_sizes[0] == 3);
    CHECK(od.total() == 3);
    // canonical representative is the lexicographically least residue x'' = 1
    CHECK(od.representatives[0].uprime.at(0, 1).class_key(1, 1) == 1);
}

TEST_CASE("orbit sizes partition the cell") {
    for (auto [p, a1, a2] : std::vector<std::tuple<std::uint64_t, long long, long long>>{
             {2, 1, 1}, {3, 1, 1}, {2, 2, 1}}) {
        CellSpec spec = CellSpec::make(p, 3, 1, {a1, a2});
        auto cell = enumerate_cell(spec);
        auto od = orbit_decompose_of(spec, cell);
        CHECK(od.total() == cell.size());
    }
}

TEST_CASE("S_w(theta_x) on the anchored representative") {
    CellSpec spec = CellSpec::make(3, 2, 1, {1}, {1, -1});
    auto od = orbit_decompose(spec);
    REQUIRE(od.representatives.size() == 1);
    CycloSum sw = s_w_theta(od.representatives[0], spec, 1);
    CHECK(sw.equals(three_zeta3_sq().embedded(sw.order_exp())));
}

TEST_CASE("trivial theta sums to the cardinality of V_w") {
    // integral kappas: theta is trivial, so S_w = |V_w(ell)|
    CellSpec spec = CellSpec::make(3, 2, 1, {1}, {1, -1});
    PrimeContext ctx = spec.context();
    CellElement x{UpperUnipotent(2, ctx), UpperUnipotent(2, ctx)};
    x.u.at(0, 1) = Padic::from_integer(5, ctx);
    x.uprime.at(0, 1) = Padic::from_integer(2, ctx);
    CycloSum sw = s_w_theta(x, spec, 2);
    CHECK(sw.equals(CycloSum::integer(3, ctx.root_order_exp, 9))); // p^{(n-1) ell} = 9
}

TEST_CASE("stevens identity on anchored and GL(3) cells") {
    CHECK(stevens_identity_check(CellSpec::make(3, 2, 1, {1}, {1, -1})));
    CHECK(stevens_identity_check(CellSpec::make(3, 2, 1, {1}, {1, 1}))); // empty cell: 0 = 0
    CHECK(stevens_identity_check(CellSpec::make(2, 3, 1, {1, 1})));
}

TEST_CASE("GL(2) sums equal restricted S_2 with mapped parameters") {
    // Kl(n=2; a, v=(1,-1), nu=nu'=1) = S_2(nu' v_1^{-1}, -nu v_2; p^a) = S_2(1, 1; p^a)
    NuParam one{1, 0};
    for (std::uint64_t p : {2ull, 3ull, 5ull})
        for (long long a : {1ll, 2ll}) {
            CellSpec spec = CellSpec::make(p, 2, 1, {a}, {1, -1});
            PrimeContext ctx = spec.context();
            CycloSum kl = kloosterman_sum(spec);
            CycloSum s2 = s2_restricted(one, one, a, 1, ctx);
            CHECK(kl.equals(s2));
        }
}

TEST_CASE("negating all character parameters conjugates the sum") {
    CellSpec spec = CellSpec::make(3, 2, 1, {1}, {1, -1});
    CellSpec neg = spec;
    for (auto& v : neg.nu) v.num = -v.num;
    for (auto& v : neg.nu_prime) v.num = -v.num;
    CHECK(kloosterman_sum(neg).equals(kloosterman_sum(spec).conj()));

    CellSpec spec3 = CellSpec::make(2, 3, 1, {1, 1});
    CellSpec neg3 = spec3;
    for (auto& v : neg3.nu) v.num = -v.num;
    for (auto& v : neg3.nu_prime) v.num = -v.num;
    CHECK(kloosterman_sum(neg3).equals(kloosterman_sum(spec3).conj()));
}

TEST_CASE("involution symmetry of magnitudes") {
    for (auto [p, a1, a2] : std::vector<std::tuple<std::uint64_t, long long, long long>>{
             {2, 1, 2}, {3, 2, 1}, {2, 2, 2}}) {
        CellSpec spec = CellSpec::make(p, 3, 1, {a1, a2});
        CellSpec rev = spec.reversed();
        double m1 = kloosterman_sum(spec).magnitude();
        double m2 = kloosterman_sum(rev).magnitude();
        CHECK(m1 == doctest::Approx(m2).epsilon(1e-9));
    }
}

TEST_CASE("cell size bounded by p^{n(n-1)m} O_f0") {
    for (auto [p, a1, a2] : std::vector<std::tuple<std::uint64_t, long long, long long>>{
             {2, 1, 1}, {3, 1, 2}}) {
        CellSpec spec = CellSpec::make(p, 3, 1, {a1, a2});
        auto cell = enumerate_cell(spec);
        BigRational orb = orbital_integral_DR(spec.torus(), p);
        BigInt cap = 1;
        for (int i = 0; i < 3 * 2 * spec.m; ++i) cap *= p;
        CHECK(BigRational(BigInt(cell.size())) <= BigRational(cap) * orb);
    }
}

TEST_CASE("enumeration is independent of worker partitioning") {
    CellSpec spec = CellSpec::make(2, 3, 1, {2, 1});
    EnumerationOptions seq, par;
    par.threads = 3;
    auto a = enumerate_cell(spec, seq);
    auto b = enumerate_cell(spec, par);
    REQUIRE(a.size() == b.size());
    const int ell = static_cast<int>(spec.ell());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i].key(ell, spec.m) == b[i].key(ell, spec.m));
    CHECK(kloosterman_sum_of(spec, a).equals(kloosterman_sum_of(spec, b)));
}

TEST_CASE("budget exhaustion raises Infeasible") {
    CellSpec spec = CellSpec::make(3, 3, 1, {2, 2});
    EnumerationOptions opt;
    opt.budget = 3;
    CHECK_THROWS_AS(enumerate_cell(spec, opt), Infeasible);
}

TEST_CASE("character parameter validation") {
    CellSpec spec = CellSpec::make(3, 2, 1, {1}, {1, -1});
    spec.nu[0] = NuParam{9, 0}; // |nu| = p^{-2} below p^{-m}
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.nu[0] = NuParam{1, 2}; // |nu| = p^2 above p^m
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.nu[0] = NuParam{1, 1}; // |nu| = p, allowed
    spec.validate();
}

TEST_CASE("|Kl| never exceeds the cell size") {
    for (auto [p, n] : std::vector<std::pair<std::uint64_t, int>>{{2, 3}, {3, 3}, {5, 2}}) {
        CellSpec spec = CellSpec::make(p, n, 1,
                                       std::vector<long long>(static_cast<std::size_t>(n - 1), 1));
        auto cell = enumerate_cell(spec);
        CHECK(kloosterman_sum_of(spec, cell).magnitude() <=
              static_cast<double>(cell.size()) + 1e-9);
    }
}

TEST_CASE("stevens identity with non-default character parameters") {
    // nu-weighted theta: the orbit argument is insensitive to the weights
    CellSpec spec = CellSpec::make(3, 2, 1, {2}, {1, -1});
    spec.nu[0] = NuParam{1, 1};       // 1/p
    spec.nu_prime[0] = NuParam{3, 0}; // p
    CHECK(stevens_identity_check(spec));
    CellSpec s3 = CellSpec::make(2, 3, 1, {1, 1});
    s3.nu[0] = NuParam{1, 1};
    s3.nu_prime[1] = NuParam{2, 0};
    CHECK(stevens_identity_check(s3));
}

TEST_CASE("level m=2 cells: GL(2) equivalence and Stevens identity") {
    NuParam one{1, 0};
    for (std::uint64_t p : {2ull, 3ull})
        for (long long a : {2ll, 3ll}) {
            CellSpec spec = CellSpec::make(p, 2, 2, {a}, {1, -1});
            CycloSum kl = kloosterman_sum(spec);
            CycloSum s2 = s2_restricted(one, one, a, 2, spec.context());
            CHECK(kl.equals(s2));
            CHECK(stevens_identity_check(spec));
        }
    CHECK(stevens_identity_check(CellSpec::make(2, 3, 2, {2, 2})));
}

TEST_CASE("larger GL(2) exponents stay exact") {
    NuParam one{1, 0};
    for (long long a : {4ll, 5ll}) {
        CellSpec spec = CellSpec::make(3, 2, 1, {a}, {1, -1});
        auto cell = enumerate_cell(spec);
        CHECK(cell.size() == spec.context().p_pow(static_cast<int>(a)));
        CHECK(kloosterman_sum_of(spec, cell)
                  .equals(s2_restricted(one, one, a, 1, spec.context())));
    }
}
