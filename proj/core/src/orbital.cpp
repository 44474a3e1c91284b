#include "kgl/orbital.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "kgl/kloosterman.hpp"

namespace kgl {

Cocharacter cocharacter_of_torus(const TorusDiag& a) { return a.exponents; }

int CorootDecomposition::kappa() const {
    int k = 0;
    for (const auto& [ij, w] : weights)
        if (w > 0) ++k;
    return k;
}

std::vector<CorootDecomposition> enumerate_decompositions(const Cocharacter& lambda) {
    const int n = static_cast<int>(lambda.size());
    std::vector<CorootDecomposition> out;
    long long total = std::accumulate(lambda.begin(), lambda.end(), 0ll);
    if (n == 0 || total != 0) return out;

    // Process coroots (i, j) in lexicographic order grouped by first index:
    // when group i starts, the residual i-th coordinate mu_i is final and must
    // be distributed over m_{i,i+1..n} as a composition; negative residual
    // prunes the branch.
    std::vector<long long> mu(lambda.begin(), lambda.end());
    CorootDecomposition cur;

    std::function<void(int)> per_group = [&](int i) {
        if (i == n - 1) {
            // remaining coordinates are mu_{n-1} (must be 0; guaranteed) and done
            out.push_back(cur);
            return;
        }
        long long need = mu[static_cast<std::size_t>(i)];
        if (need < 0) return;
        // distribute `need` over slots j = i+1..n-1
        std::function<void(int, long long)> distribute = [&](int j, long long left) {
            if (j == n - 1) {
                if (left != 0) {
                    cur.weights[{i + 1, n}] = left;
                    mu[static_cast<std::size_t>(n - 1)] += left;
                    per_group(i + 1);
                    mu[static_cast<std::size_t>(n - 1)] -= left;
                    cur.weights.erase({i + 1, n});
                } else {
                    per_group(i + 1);
                }
                return;
            }
            for (long long w = 0; w <= left; ++w) {
                if (w != 0) {
                    cur.weights[{i + 1, j + 1}] = w;
                    mu[static_cast<std::size_t>(j)] += w;
                }
                distribute(j + 1, left - w);
                if (w != 0) {
                    mu[static_cast<std::size_t>(j)] -= w;
                    cur.weights.erase({i + 1, j + 1});
                }
            }
        };
        distribute(i + 1, need);
    };
    per_group(0);
    return out;
}

std::uint64_t decomposition_count_R(const TorusDiag& a) {
    return static_cast<std::uint64_t>(enumerate_decompositions(cocharacter_of_torus(a)).size());
}

BigInt r_estimate_bound(const Cocharacter& lambda) {
    const int n = static_cast<int>(lambda.size());
    BigInt b = 1;
    long long prefix = 0;
    for (int i = 1; i <= n - 1; ++i) {
        prefix += lambda[static_cast<std::size_t>(i - 1)];
        long long mi = prefix;
        if (mi < 0) return 0; // not decomposable
        BigInt base = mi + 1;
        long long e = static_cast<long long>(i) * (n - i);
        BigInt f = 1;
        for (long long t = 0; t < e; ++t) f *= base;
        b *= f;
    }
    return b;
}

BigRational orbital_integral_DR(const TorusDiag& a, std::uint64_t p) {
    Cocharacter lambda = cocharacter_of_torus(a);
    auto decomps = enumerate_decompositions(lambda);
    if (decomps.empty()) return BigRational(0);
    // Delta(a) = p^{-2 sum of prefix sums}; prefix sums are the simple-coroot
    // coordinates, all >= 0 for decomposable lambda.
    long long exp_sum = 0, prefix = 0;
    for (std::size_t i = 0; i + 1 < lambda.size(); ++i) {
        prefix += lambda[i];
        exp_sum += prefix;
    }
    BigInt scale = 1;
    for (long long i = 0; i < exp_sum; ++i) scale *= p;
    BigRational q(static_cast<long long>(p) - 1, static_cast<long long>(p)); // 1 - 1/p
    BigRational s(0);
    for (const auto& d : decomps) {
        BigRational term(1);
        for (int k = 0; k < d.kappa(); ++k) term *= q;
        s += term;
    }
    return BigRational(scale) * s;
}

namespace {

// m = 0 analogue of the cell enumerator: count u' with w c u' in N(Q_p) K,
// level-by-level bottom-minor integrality with a unit per level.
struct BruteForce {
    int n;
    PrimeContext ctx;
    TorusDiag c;
    std::vector<long long> prefix; // s_i = lambda_1 + ... + lambda_i
    long long budget;
    long long used = 0;
    PMatrix g;
    std::uint64_t count = 0;

    BruteForce(const TorusDiag& a, std::uint64_t p, long long budget_)
        : n(a.n()),
          ctx(p, working_precision(a.n(), 2 * max_prefix(a) + 1, 1),
              root_order(max_prefix(a), 1)),
          c(a), budget(budget_), g(a.n(), ctx) {
        prefix.resize(static_cast<std::size_t>(n - 1));
        long long s = 0;
        for (int i = 0; i + 1 < n; ++i) {
            s += a.exponents[static_cast<std::size_t>(i)];
            prefix[static_cast<std::size_t>(i)] = s;
        }
        for (int r = 0; r < n; ++r) g.at(n - 1 - r, r) = c.entry(r, ctx);
    }

    static long long max_prefix(const TorusDiag& a) {
        long long best = 0, prefix = 0;
        for (std::size_t i = 0; i + 1 < a.exponents.size(); ++i) {
            prefix += a.exponents[i];
            best = std::max(best, prefix);
        }
        return best;
    }

    bool level_ok(int k) const {
        auto minors = bottom_minors(g, k);
        bool has_unit = false;
        for (const auto& [J, d] : minors) {
            if (d.is_exact_zero()) continue;
            if (!d.in_pk(0)) return false;
            if (d.valuation_is(0)) has_unit = true;
        }
        return has_unit;
    }

    void recurse(int r, int j) {
        if (r == n - 1) {
            ++count;
            return;
        }
        if (j == r) {
            if (level_ok(r + 1)) recurse(r + 1, n - 1);
            return;
        }
        // entry denominators are bounded by the row's prefix sum
        const long long er = prefix[static_cast<std::size_t>(r)];
        const std::uint64_t steps = ctx.p_pow(static_cast<int>(std::max<long long>(0, er)));
        for (std::uint64_t t = 0; t < steps; ++t) {
            if (++used > budget) throw Infeasible("orbital_bruteforce budget exceeded");
            Padic x = Padic::from_scaled(static_cast<long long>(t),
                                         static_cast<int>(std::max<long long>(0, er)), ctx);
            g.at(n - 1 - r, j) = c.entry(r, ctx) * x;
            recurse(r, j - 1);
        }
    }
};

} // namespace

std::uint64_t orbital_bruteforce(const TorusDiag& a, std::uint64_t p, long long budget) {
    if (a.det_valuation() != 0) return 0; // determinant cannot be a unit
    for (long long s = 0, i = 0; i + 1 < a.n(); ++i) {
        s += a.exponents[static_cast<std::size_t>(i)];
        if (s < 0) return 0; // a leftmost-column minor has negative valuation
    }
    BruteForce bf(a, p, budget);
    if (bf.n == 1) return 1;
    bf.recurse(0, bf.n - 1);
    return bf.count;
}

double GermValue::magnitude() const {
    return value.magnitude() * std::pow(static_cast<double>(value.p()), -static_cast<double>(norm_exp));
}

bool GermValue::equals(const GermValue& o) const {
    if (value.p() != o.value.p()) return false;
    // v1 p^{-k1} == v2 p^{-k2}  <=>  p^{k2} v1 == p^{k1} v2
    long long k1 = norm_exp, k2 = o.norm_exp;
    long long s1 = 1, s2 = 1;
    for (long long i = 0; i < k2; ++i) s1 *= static_cast<long long>(value.p());
    for (long long i = 0; i < k1; ++i) s2 *= static_cast<long long>(value.p());
    return value.scaled(s1).equals(o.value.scaled(s2));
}

GermValue germ_longest(const CellSpec& spec) {
    GermValue g;
    g.value = kloosterman_sum(spec).conj();
    g.norm_exp = static_cast<long long>(spec.n) * (spec.n - 1) / 2 * spec.m;
    g.domain_normalized = spec.germ_normalized();
    return g;
}

GermValue germ_relevant(const RelevantWeyl& w, const std::vector<CellSpec>& blocks) {
    if (w.composition.size() != blocks.size())
        throw BlockMismatch("germ_relevant: composition and block count differ");
    if (blocks.empty()) throw BlockMismatch("germ_relevant: no blocks");
    const std::uint64_t p = blocks.front().p;
    const int m = blocks.front().m;
    int max_L = 1;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (blocks[i].n != w.composition[i])
            throw BlockMismatch("germ_relevant: block size does not match composition");
        if (blocks[i].p != p || blocks[i].m != m)
            throw BlockMismatch("germ_relevant: blocks must share p and level m");
        if (blocks[i].torus().det_valuation() != 0)
            throw DetNotUnit("germ_relevant: block determinant is not a unit");
        max_L = std::max(max_L, blocks[i].context().root_order_exp);
    }
    GermValue out;
    out.value = CycloSum::integer(p, max_L, 1);
    out.norm_exp = 0;
    out.domain_normalized = true;
    for (const auto& b : blocks) {
        GermValue gb = germ_longest(b);
        out.value = out.value * gb.value.embedded(max_L);
        out.norm_exp += gb.norm_exp;
        out.domain_normalized = out.domain_normalized && gb.domain_normalized;
    }
    out.value.canonicalize();
    return out;
}

} // namespace kgl
