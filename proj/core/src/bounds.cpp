#include "kgl/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "kgl/kloosterman.hpp"
#include "kgl/orbital.hpp"

namespace kgl {

namespace {

BoundInt ipow(BoundInt base, long long e) {
    BoundInt r = 1;
    for (long long i = 0; i < e; ++i) r *= base;
    return r;
}

long long min3(long long a, long long b, long long c) { return std::min(a, std::min(b, c)); }

} // namespace

double p_pow_frac(std::uint64_t p, long long e_num, long long e_den) {
    // p^{e_num/e_den}: exact integer power times a fractional-root factor
    long long q = e_num >= 0 ? e_num / e_den : -((-e_num + e_den - 1) / e_den);
    long long rem = e_num - q * e_den; // 0 <= rem < e_den
    double head = q >= 0 ? static_cast<double>(ipow(p, q)) : 1.0 / static_cast<double>(ipow(p, -q));
    double tail = rem == 0 ? 1.0
                           : std::pow(static_cast<double>(p),
                                      static_cast<double>(rem) / static_cast<double>(e_den));
    return head * tail;
}

double weil_bound(const NuParam& nu, const NuParam& nu_prime, long long ell, int m,
                  std::uint64_t p) {
    if (ell < 0) throw ConfigError("weil_bound: ell >= 0");
    long long vn = nu.valuation(p), vnp = nu_prime.valuation(p);
    // gcd of p-powers: p^{min(m + v(nu), m + v(nu'), ell + m)}
    long long g = min3(m + vn, m + vnp, ell + m);
    if (g < 0) throw ConfigError("weil_bound: |p^m nu| must be integral");
    // (ell+m+1) * p^{m/2} * p^{g/2} * p^{(ell+m)/2}
    long long twice_exp = m + g + ell + m;
    return static_cast<double>(ell + m + 1) * p_pow_frac(p, twice_exp, 2);
}

BoundRational thm_wn_exponent_factor(int n) {
    if (n < 3) throw ConfigError("thm_wn_exponent_factor: n >= 3");
    long long q = 4ll * n * n - 18ll * n + 22;
    return BoundRational(q - 1, q);
}

double thm_wn_constant(int n, std::uint64_t p, int m, long long ell) {
    // 2^{n^2-1} p^{(2n+7)(n-1)m} (ell+(n-1)m+1)^{n^2-1} ((n-1)ell+n)^{n^3/2}
    BoundInt c = ipow(2, static_cast<long long>(n) * n - 1);
    c *= ipow(p, (2ll * n + 7) * (n - 1) * m);
    c *= ipow(BoundInt(ell + static_cast<long long>(n - 1) * m + 1),
              static_cast<long long>(n) * n - 1);
    long long poly_base = (static_cast<long long>(n) - 1) * ell + n;
    long long n3 = static_cast<long long>(n) * n * n;
    BoundInt poly = ipow(BoundInt(poly_base), n3 / 2);
    double v = static_cast<double>(c) * static_cast<double>(poly);
    if (n3 % 2 != 0) v *= std::sqrt(static_cast<double>(poly_base));
    return v;
}

double bound_thm_wn(const CellSpec& spec) {
    const int n = spec.n;
    if (n < 3) throw ConfigError("bound_thm_wn: n >= 3");
    const long long ell = spec.ell();
    const long long a1 = spec.a.front(), an1 = spec.a.back();
    const long long sigma = std::min(a1, an1), rho = std::max(a1, an1);
    long long mid = 0; // a_2 + ... + a_{n-2}
    for (int i = 1; i + 1 < n - 1; ++i) mid += spec.a[static_cast<std::size_t>(i)];
    const long long half_m_term = static_cast<long long>(n) * (n - 1) * spec.m; // 2 * n(n-1)m/2

    const double cn = thm_wn_constant(n, spec.p, spec.m, ell);
    // exponents kept as twice-values to stay integral
    long long e1 = 2 * (sigma + mid) + rho + half_m_term;
    long long e2 = ell + 4 * sigma + 2 * (n - 3) * rho + 2 * mid - 2 * ell + half_m_term;
    double minform = cn * std::min(p_pow_frac(spec.p, e1, 2), p_pow_frac(spec.p, e2, 2));

    long long asum = 0;
    for (long long ai : spec.a) asum += ai;
    BoundRational fac = thm_wn_exponent_factor(n);
    long long unum = static_cast<long long>(boost::multiprecision::numerator(fac)) * asum;
    long long uden = static_cast<long long>(boost::multiprecision::denominator(fac));
    double uniform =
        cn * p_pow_frac(spec.p, unum * 2 + uden * half_m_term, 2 * uden);
    return std::min(minform, uniform);
}

double thm_w8_constant(std::uint64_t p, int m, long long ell, long long rho, long long r,
                       long long sigma) {
    BoundInt c = 8;
    c *= ipow(p, 12ll * m);
    c *= ipow(BoundInt(ell + m + 1), 3);
    c *= BoundInt(rho + m + 1);
    c *= ipow(BoundInt(r + m + 1), 2);
    c *= ipow(BoundInt(sigma + m + 1), 2);
    return static_cast<double>(c);
}

double bound_thm_w8(const CellSpec& spec) {
    if (spec.n != 4) throw ConfigError("bound_thm_w8: n must be 4");
    // ladder (s, r, t) = (a_1, a_2, a_3); the bound is symmetric in t <-> s
    const long long s = spec.a[0], r = spec.a[1], t = spec.a[2];
    const long long ell = spec.ell();
    const long long rho = std::max(t, s), sigma = std::min(t, s);
    const int m = spec.m;
    double c8 = thm_w8_constant(spec.p, m, ell, rho, r, sigma);
    long long e1 = 2 * r + 2 * sigma + rho + 6ll * m; // 2*(r + sigma + rho/2 + 3m)
    long long e2 = 2 * rho + 3 * sigma + r + 6ll * m; // 2*(rho + 3sigma/2 + r/2 + 3m)
    double minform = c8 * std::min(p_pow_frac(spec.p, e1, 2), p_pow_frac(spec.p, e2, 2));
    double sevenEighths = c8 * p_pow_frac(spec.p, 7 * (t + r + s) + 24ll * m, 8);
    return std::min(minform, sevenEighths);
}

double bound_general_nu(const CellSpec& spec) {
    const int n = spec.n;
    if (n < 3) throw ConfigError("bound_general_nu: n >= 3");
    const long long ell = spec.ell();
    const int m = spec.m;
    // product of gcd factors (|nu_j nu'_{n-j} p^{2m}|^{-1}, p^{ell+m})^{1/2}
    long long gcd_twice = 0;
    for (int j = 1; j <= n - 1; ++j) {
        long long vj = spec.nu[static_cast<std::size_t>(j - 1)].valuation(spec.p);
        long long vpj = spec.nu_prime[static_cast<std::size_t>(n - 1 - j)].valuation(spec.p);
        long long e = std::min(2ll * m + vj + vpj, ell + m);
        if (e < 0) throw ConfigError("bound_general_nu: character parameters out of range");
        gcd_twice += e;
    }
    if (n == 4) {
        const long long s = spec.a[0], r = spec.a[1], t = spec.a[2];
        const long long rho = std::max(t, s), sigma = std::min(t, s);
        BoundInt c = 8;
        c *= ipow(spec.p, 9ll * m);
        c *= ipow(BoundInt(ell + m + 1), 3);
        c *= BoundInt(rho + m + 1);
        c *= ipow(BoundInt(r + m + 1), 2);
        c *= ipow(BoundInt(sigma + m + 1), 2);
        double d8 = static_cast<double>(c) * p_pow_frac(spec.p, gcd_twice, 2);
        long long e1 = 2 * r + 2 * sigma + rho + 6ll * m;
        long long e2 = 2 * rho + 3 * sigma + r + 6ll * m;
        double minform = d8 * std::min(p_pow_frac(spec.p, e1, 2), p_pow_frac(spec.p, e2, 2));
        double sevenEighths = d8 * p_pow_frac(spec.p, 7 * (t + r + s) + 24ll * m, 8);
        return std::min(minform, sevenEighths);
    }
    // D_n: C_n with the p^{(n-1)m} gcd block replaced by the nu-dependent one
    BoundInt c = ipow(2, static_cast<long long>(n) * n - 1);
    c *= ipow(spec.p, 2ll * (n + 3) * (n - 1) * m);
    c *= ipow(BoundInt(ell + static_cast<long long>(n - 1) * m + 1),
              static_cast<long long>(n) * n - 1);
    long long poly_base = (static_cast<long long>(n) - 1) * ell + n;
    long long n3 = static_cast<long long>(n) * n * n;
    double dn = static_cast<double>(c) * static_cast<double>(ipow(BoundInt(poly_base), n3 / 2));
    if (n3 % 2 != 0) dn *= std::sqrt(static_cast<double>(poly_base));
    dn *= p_pow_frac(spec.p, gcd_twice, 2);

    const long long a1 = spec.a.front(), an1 = spec.a.back();
    const long long sigma = std::min(a1, an1), rho = std::max(a1, an1);
    long long mid = 0;
    for (int i = 1; i + 1 < n - 1; ++i) mid += spec.a[static_cast<std::size_t>(i)];
    const long long half_m_term = static_cast<long long>(n) * (n - 1) * m;
    long long e1 = 2 * (sigma + mid) + rho + half_m_term;
    long long e2 = ell + 4 * sigma + 2 * (n - 3) * rho + 2 * mid - 2 * ell + half_m_term;
    double minform = dn * std::min(p_pow_frac(spec.p, e1, 2), p_pow_frac(spec.p, e2, 2));
    long long asum = 0;
    for (long long ai : spec.a) asum += ai;
    BoundRational fac = thm_wn_exponent_factor(n);
    long long unum = static_cast<long long>(boost::multiprecision::numerator(fac)) * asum;
    long long uden = static_cast<long long>(boost::multiprecision::denominator(fac));
    double uniform = dn * p_pow_frac(spec.p, unum * 2 + uden * half_m_term, 2 * uden);
    return std::min(minform, uniform);
}

std::optional<long long> thm_wn_nontriviality_threshold(int n, std::uint64_t p, int m,
                                                        double eps, long long max_scan) {
    if (n < 3) throw ConfigError("thm_wn_nontriviality_threshold: n >= 3");
    const double logp = std::log2(static_cast<double>(p));
    for (long long t = m; t <= max_scan; ++t) {
        // log2 of the uniform-form bound on the diagonal ray vs the trivial bound
        long long asum = static_cast<long long>(n - 1) * t;
        BoundRational fac = thm_wn_exponent_factor(n);
        double expo = static_cast<double>(fac) * static_cast<double>(asum) +
                      static_cast<double>(n) * (n - 1) / 2.0 * m;
        double logc = std::log2(thm_wn_constant(n, p, m, t));
        double log_bound = logc + expo * logp;
        double log_trivial = (1.0 + eps) * static_cast<double>(asum) * logp;
        if (log_bound < log_trivial) return t;
    }
    return std::nullopt;
}

std::vector<BoundReportRow> germ_decay_sweep(const CellSpec& tmpl, double delta,
                                             const std::vector<std::vector<long long>>& ray) {
    const int n = tmpl.n;
    double cap = 1.0 / (8.0 * n * n - 36.0 * n + 44.0);
    if (!(delta > 0.0 && delta < cap))
        throw ConfigError("germ_decay_sweep: delta outside (0, 1/(8n^2-36n+44))");
    std::vector<BoundReportRow> rows;
    for (const auto& a : ray) {
        CellSpec spec = tmpl;
        spec.a = a;
        spec.validate();
        auto cell = enumerate_cell(spec);
        CycloSum kl = kloosterman_sum_of(spec, cell);
        BoundReportRow row;
        row.p = spec.p;
        row.m = spec.m;
        row.n = n;
        row.a = a;
        row.cell_size = cell.size();
        row.path = "generic";
        // germ magnitude |conj Kl| p^{-n(n-1)m/2} times Delta^{1/2-delta}(c)
        double norm = std::pow(static_cast<double>(spec.p),
                               -static_cast<double>(n) * (n - 1) / 2.0 * spec.m);
        long long asum = 0;
        for (long long ai : a) asum += ai;
        double decay = std::pow(static_cast<double>(spec.p),
                                -(1.0 - 2.0 * delta) * static_cast<double>(asum));
        row.magnitude = kl.magnitude() * norm * decay;
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace kgl
