#include "kgl/cell.hpp"

#include <algorithm>

namespace kgl {

Padic NuParam::to_padic(const PrimeContext& ctx) const {
    return Padic::from_scaled(num, den_exp, ctx);
}

long long NuParam::valuation(std::uint64_t p) const {
    if (num == 0) throw ConfigError("NuParam: zero character parameter");
    long long v = 0;
    long long x = num < 0 ? -num : num;
    while (x % static_cast<long long>(p) == 0) { x /= static_cast<long long>(p); ++v; }
    return v - den_exp;
}

CellSpec CellSpec::make(std::uint64_t p, int n, int m, std::vector<long long> a,
                        std::vector<long long> units) {
    CellSpec s;
    s.p = p;
    s.n = n;
    s.m = m;
    s.a = std::move(a);
    if (units.empty()) {
        // default: all 1 except the last, signed so that det(wc) = 1 mod p^m
        units.assign(static_cast<std::size_t>(n), 1);
        long long wsign = (static_cast<long long>(n) * (n - 1) / 2) % 2 == 0 ? 1 : -1;
        units[static_cast<std::size_t>(n - 1)] = wsign;
    }
    s.units = std::move(units);
    s.nu.assign(static_cast<std::size_t>(std::max(0, n - 1)), NuParam{});
    s.nu_prime.assign(static_cast<std::size_t>(std::max(0, n - 1)), NuParam{});
    s.validate();
    return s;
}

void CellSpec::validate() const {
    if (!is_prime_u64(p)) throw ConfigError("CellSpec: p must be prime");
    if (n < 1) throw ConfigError("CellSpec: n >= 1");
    if (m < 1) throw ConfigError("CellSpec: level m >= 1");
    if (static_cast<int>(a.size()) != n - 1) throw ConfigError("CellSpec: need n-1 exponents");
    if (static_cast<int>(units.size()) != n) throw ConfigError("CellSpec: need n units");
    for (long long ai : a)
        if (ai < 0) throw ConfigError("CellSpec: exponents must be >= 0");
    for (long long v : units)
        if (v % static_cast<long long>(p) == 0) throw ConfigError("CellSpec: units must be prime to p");
    if (static_cast<int>(nu.size()) != n - 1 || static_cast<int>(nu_prime.size()) != n - 1)
        throw ConfigError("CellSpec: need n-1 character parameters on each side");
    for (const auto& v : nu) {
        long long val = v.valuation(p);
        if (val < -m || val > m) throw ConfigError("CellSpec: |nu| must lie in [p^-m, p^m]");
    }
    for (const auto& v : nu_prime) {
        long long val = v.valuation(p);
        if (val < -m || val > m) throw ConfigError("CellSpec: |nu'| must lie in [p^-m, p^m]");
    }
}

long long CellSpec::ell() const {
    long long e = 0;
    for (long long ai : a) e = std::max(e, ai);
    return e;
}

PrimeContext CellSpec::context() const {
    return PrimeContext(p, working_precision(n, ell(), m) + extra_precision,
                        root_order(ell(), m));
}

TorusDiag CellSpec::torus() const {
    TorusDiag t;
    t.exponents.resize(static_cast<std::size_t>(n));
    t.units = units;
    for (int i = 0; i < n; ++i) {
        long long hi = (i < n - 1) ? a[static_cast<std::size_t>(i)] : 0;
        long long lo = (i > 0) ? a[static_cast<std::size_t>(i - 1)] : 0;
        t.exponents[static_cast<std::size_t>(i)] = hi - lo;
    }
    return t;
}

bool CellSpec::feasible() const {
    // det(w c) = (-1)^{n(n-1)/2} prod v_i must be 1 mod p^m
    PrimeContext ctx(p, m + 2, 1);
    Padic d = Padic::one(ctx);
    for (long long v : units) d *= Padic::from_integer(v, ctx);
    if ((static_cast<long long>(n) * (n - 1) / 2) % 2 != 0) d = -d;
    return d.is_one_mod_pk(m);
}

bool CellSpec::germ_normalized() const {
    PrimeContext ctx(p, m + 2, 1);
    Padic d = Padic::one(ctx);
    for (long long v : units) d *= Padic::from_integer(v, ctx);
    long long e = (static_cast<long long>(n) + 1) * (n + 2) / 2 + 1;
    Padic target = Padic::from_integer(e % 2 == 0 ? 1 : -1, ctx);
    return d.equals_at_precision(target);
}

CellSpec CellSpec::reversed() const {
    CellSpec r = *this;
    std::reverse(r.a.begin(), r.a.end());
    // iota sends c to w c^{-1} w: reversed exponents, reversed inverted units,
    // reversed character weights. Inverses taken at full working precision.
    PrimeContext ctx = context();
    for (int i = 0; i < n; ++i) {
        long long v = units[static_cast<std::size_t>(n - 1 - i)];
        std::uint64_t vres = Padic::from_integer(v, ctx).num();
        r.units[static_cast<std::size_t>(i)] = static_cast<long long>(inv_mod(vres, ctx.pw));
    }
    std::reverse(r.nu.begin(), r.nu.end());
    std::reverse(r.nu_prime.begin(), r.nu_prime.end());
    return r;
}

} // namespace kgl
