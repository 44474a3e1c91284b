#include "kgl/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace kgl {

PMatrix::PMatrix(int n, const PrimeContext& ctx) : n_(n), ctx_(ctx) {
    if (n < 1) throw ConfigError("PMatrix: n >= 1");
    e_.assign(static_cast<std::size_t>(n) * n, Padic::zero(ctx));
}

PMatrix PMatrix::identity(int n, const PrimeContext& ctx) {
    PMatrix m(n, ctx);
    for (int i = 0; i < n; ++i) m.at(i, i) = Padic::one(ctx);
    return m;
}

PMatrix PMatrix::operator*(const PMatrix& o) const {
    if (n_ != o.n_) throw ConfigError("PMatrix: size mismatch");
    PMatrix r(n_, ctx_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            Padic s = Padic::zero(ctx_);
            for (int k = 0; k < n_; ++k) s += at(i, k) * o.at(k, j);
            r.at(i, j) = s;
        }
    return r;
}

PMatrix PMatrix::transpose() const {
    PMatrix r(n_, ctx_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) r.at(j, i) = at(i, j);
    return r;
}

namespace {

// Exact determinant by cofactor expansion; ring operations only, n <= 6.
Padic det_rec(const PMatrix& g, const std::vector<int>& rows, const std::vector<int>& cols) {
    const std::size_t k = rows.size();
    if (k == 0) return Padic::one(g.ctx());
    if (k == 1) return g.at(rows[0], cols[0]);
    Padic s = Padic::zero(g.ctx());
    int r0 = rows[0];
    std::vector<int> srows(rows.begin() + 1, rows.end());
    for (std::size_t t = 0; t < k; ++t) {
        const Padic& piv = g.at(r0, cols[t]);
        if (piv.is_exact_zero()) continue;
        std::vector<int> scols;
        scols.reserve(k - 1);
        for (std::size_t j = 0; j < k; ++j)
            if (j != t) scols.push_back(cols[j]);
        Padic term = piv * det_rec(g, srows, scols);
        s += (t % 2 == 0) ? term : -term;
    }
    return s;
}

Padic submatrix_det(const PMatrix& g, const std::vector<int>& rows, const std::vector<int>& cols) {
    return det_rec(g, rows, cols);
}

} // namespace

Padic PMatrix::det() const {
    std::vector<int> idx(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) idx[static_cast<std::size_t>(i)] = i;
    return submatrix_det(*this, idx, idx);
}

PMatrix PMatrix::inverse() const {
    Padic d = det();
    if (d.is_exact_zero()) throw NotInvertible("PMatrix::inverse: exact zero determinant");
    if (d.is_zero_at_precision()) throw NotInvertible("PMatrix::inverse: determinant 0 at precision");
    PMatrix r(n_, ctx_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            std::vector<int> rows, cols;
            for (int rr = 0; rr < n_; ++rr)
                if (rr != j) rows.push_back(rr);
            for (int cc = 0; cc < n_; ++cc)
                if (cc != i) cols.push_back(cc);
            Padic cof = submatrix_det(*this, rows, cols);
            if ((i + j) % 2 != 0) cof = -cof;
            r.at(i, j) = cof.div(d);
        }
    return r;
}

bool PMatrix::equals_at_precision(const PMatrix& o) const {
    if (n_ != o.n_) return false;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            if (!at(i, j).equals_at_precision(o.at(i, j))) return false;
    return true;
}

int PMatrix::max_scale() const {
    int s = 0;
    for (const auto& x : e_) s = std::max(s, x.scale());
    return s;
}

UpperUnipotent::UpperUnipotent(int n, const PrimeContext& ctx) : n_(n), ctx_(ctx) {
    if (n < 1) throw ConfigError("UpperUnipotent: n >= 1");
    e_.assign(static_cast<std::size_t>(n) * (n - 1) / 2, Padic::zero(ctx));
}

Padic& UpperUnipotent::at(int i, int j) {
    if (!(0 <= i && i < j && j < n_)) throw ConfigError("UpperUnipotent::at: need i < j");
    int idx = i * n_ - i * (i + 1) / 2 + (j - i - 1);
    return e_[static_cast<std::size_t>(idx)];
}

const Padic& UpperUnipotent::at(int i, int j) const {
    return const_cast<UpperUnipotent*>(this)->at(i, j);
}

PMatrix UpperUnipotent::to_matrix() const {
    PMatrix m = PMatrix::identity(n_, ctx_);
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j) m.at(i, j) = at(i, j);
    return m;
}

UpperUnipotent UpperUnipotent::inverse() const {
    // (u^{-1})_{ij} = -u_{ij} - sum_{i<k<j} u_{ik} (u^{-1})_{kj}
    UpperUnipotent r(n_, ctx_);
    for (int span = 1; span < n_; ++span)
        for (int i = 0; i + span < n_; ++i) {
            int j = i + span;
            Padic s = -at(i, j);
            for (int k = i + 1; k < j; ++k) s -= at(i, k) * r.at(k, j);
            r.at(i, j) = s;
        }
    return r;
}

std::vector<std::uint64_t> UpperUnipotent::class_keys(int ell, int m) const {
    std::vector<std::uint64_t> keys;
    keys.reserve(e_.size());
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j) keys.push_back(at(i, j).class_key(ell, m));
    return keys;
}

PMatrix TorusDiag::to_matrix(const PrimeContext& ctx) const {
    PMatrix m(n(), ctx);
    for (int i = 0; i < n(); ++i) m.at(i, i) = entry(i, ctx);
    return m;
}

Padic TorusDiag::entry(int i, const PrimeContext& ctx) const {
    Padic u = Padic::from_integer(units[static_cast<std::size_t>(i)], ctx);
    if (u.is_zero_at_precision() || !u.valuation_is(0))
        throw ConfigError("TorusDiag: unit residue not invertible mod p");
    return u.shift(static_cast<int>(exponents[static_cast<std::size_t>(i)]));
}

long long TorusDiag::det_valuation() const {
    long long s = 0;
    for (long long e : exponents) s += e;
    return s;
}

double PPower::to_double(std::uint64_t p) const {
    if (zero) return 0.0;
    return std::pow(static_cast<double>(p), static_cast<double>(exp));
}

Padic principal_minor(const PMatrix& g, int r) {
    if (r < 1 || r > g.n()) throw ConfigError("principal_minor: 1 <= r <= n");
    std::vector<int> idx(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) idx[static_cast<std::size_t>(i)] = i;
    return submatrix_det(g, idx, idx);
}

PPower delta_big(const PMatrix& g) {
    const int n = g.n();
    long long e = 0;
    for (int r = 1; r <= n; ++r) {
        Padic d = principal_minor(g, r);
        if (d.is_exact_zero()) return PPower::null();
        long long v = d.valuation(); // PrecisionLoss if 0 at precision
        e += (r < n) ? -2 * v : 2 * v;
    }
    return PPower::of(e);
}

PPower modulus_delta(const TorusDiag& a, std::uint64_t) {
    const int n = a.n();
    long long e = 0;
    for (int i = 1; i <= n; ++i)
        e -= (n + 1 - 2 * i) * a.exponents[static_cast<std::size_t>(i - 1)];
    return PPower::of(e);
}

std::map<std::vector<int>, Padic> bottom_minors(const PMatrix& g, int k) {
    const int n = g.n();
    if (k < 1 || k > n) throw ConfigError("bottom_minors: 1 <= k <= n");
    std::vector<int> rows(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) rows[static_cast<std::size_t>(i)] = n - k + i;
    std::map<std::vector<int>, Padic> out;
    std::vector<int> cols(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) cols[static_cast<std::size_t>(i)] = i;
    while (true) {
        out.emplace(cols, submatrix_det(g, rows, cols));
        int i = k - 1;
        while (i >= 0 && cols[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++cols[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            cols[static_cast<std::size_t>(j)] = cols[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

bool in_Km(const PMatrix& g, int m) {
    const int n = g.n();
    if (m < 0) throw ConfigError("in_Km: m >= 0");
    if (m == 0) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (!g.at(i, j).in_pk(0)) return false;
        Padic d = g.det();
        if (d.is_exact_zero() || d.is_zero_at_precision()) return false;
        return d.valuation_is(0);
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Padic diff = g.at(i, j);
            if (i == j) diff -= Padic::one(g.ctx());
            if (!diff.in_pk(m)) return false;
        }
    return true;
}

bool nk_membership(const PMatrix& g, int m) {
    const int n = g.n();
    for (int k = 1; k <= n; ++k) {
        auto minors = bottom_minors(g, k);
        std::vector<int> tail(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) tail[static_cast<std::size_t>(i)] = n - k + i;
        if (m >= 1) {
            for (const auto& [J, d] : minors) {
                if (J == tail) {
                    if (!d.is_one_mod_pk(m)) return false;
                } else {
                    if (!d.in_pk(m)) return false;
                }
            }
        } else {
            bool has_unit = false;
            for (const auto& [J, d] : minors) {
                if (d.is_exact_zero()) continue;
                if (!d.in_pk(0)) return false;
                if (d.valuation_is(0)) has_unit = true;
            }
            if (!has_unit) return false;
        }
    }
    return true;
}

PMatrix weyl_matrix(const WeylPerm& w, const PrimeContext& ctx) {
    PMatrix m(w.n(), ctx);
    for (int j = 0; j < w.n(); ++j) m.at(w(j), j) = Padic::one(ctx);
    return m;
}

std::pair<UpperUnipotent, UpperUnipotent>
bruhat_extract(const PMatrix& g, const WeylPerm& w, const TorusDiag& c) {
    const int n = g.n();
    if (!w.is_longest()) throw ConfigError("bruhat_extract: w must be the longest element");
    if (c.n() != n) throw ConfigError("bruhat_extract: torus size mismatch");
    const PrimeContext& ctx = g.ctx();

    // h = (wc)^{-1} g = c^{-1} w g; for g in N wc N this factors as
    // (unit lower) x (unit upper) with all pivots exactly 1.
    PMatrix h(n, ctx);
    for (int i = 0; i < n; ++i) {
        Padic dinv = c.entry(i, ctx).inv();
        for (int j = 0; j < n; ++j) h.at(i, j) = dinv * g.at(n - 1 - i, j);
    }

    // Doolittle LU without pivoting: a vanishing pivot IS "not in the big cell".
    PMatrix L = PMatrix::identity(n, ctx);
    PMatrix U(n, ctx);
    for (int k = 0; k < n; ++k) {
        for (int j = k; j < n; ++j) {
            Padic s = h.at(k, j);
            for (int t = 0; t < k; ++t) s -= L.at(k, t) * U.at(t, j);
            U.at(k, j) = s;
        }
        const Padic& piv = U.at(k, k);
        if (piv.is_exact_zero() || piv.is_zero_at_precision())
            throw NotInBigCell("bruhat_extract: pivot minor vanishes");
        for (int i = k + 1; i < n; ++i) {
            Padic s = h.at(i, k);
            for (int t = 0; t < k; ++t) s -= L.at(i, t) * U.at(t, k);
            L.at(i, k) = s.div(piv);
        }
    }
    // In the N wc N coset every pivot is exactly 1; otherwise the torus part
    // of g disagrees with c.
    for (int k = 0; k < n; ++k)
        if (!U.at(k, k).equals_at_precision(Padic::one(ctx)))
            throw NotInBigCell("bruhat_extract: torus part disagrees with c");

    // u = (wc) L (wc)^{-1}: index-reversed conjugate scaled by the torus.
    UpperUnipotent u(n, ctx), uprime(n, ctx);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Padic num = c.entry(n - 1 - i, ctx) * L.at(n - 1 - i, n - 1 - j);
            u.at(i, j) = num.div(c.entry(n - 1 - j, ctx));
            uprime.at(i, j) = U.at(i, j);
        }
    return {u, uprime};
}

PMatrix involution_iota(const PMatrix& g) {
    const int n = g.n();
    PMatrix gi = g.transpose().inverse();
    PMatrix r(n, g.ctx());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r.at(i, j) = gi.at(n - 1 - i, n - 1 - j);
    return r;
}

UpperUnipotent grid_normal_form(const UpperUnipotent& v, int ell, int m) {
    const int n = v.n();
    const PrimeContext& ctx = v.at(0, 1).ctx();
    PMatrix M = v.to_matrix();
    // sweep by span: each correction only touches strictly longer entries
    for (int d = 1; d < n; ++d)
        for (int i = 0; i + d < n; ++i) {
            const int j = i + d;
            Padic e = M.at(i, j);
            std::uint64_t key = e.class_key(ell, m);
            Padic grid = Padic::from_scaled(static_cast<long long>(key), ell, ctx);
            Padic corr = grid - e; // in p^m Z_p: right-multiply by I + corr E_{ij}
            for (int k = 0; k <= i; ++k) M.at(k, j) += M.at(k, i) * corr;
        }
    UpperUnipotent r(n, ctx);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) r.at(i, j) = M.at(i, j);
    return r;
}

namespace {

int val_mod(std::uint64_t x, std::uint64_t p, int cap) {
    if (x == 0) return cap;
    int v = 0;
    while (x % p == 0 && v < cap) { x /= p; ++v; }
    return v;
}

// Solve x A == b over Z/p^M for a row vector x (q unknowns, ne equations),
// by Smith-style diagonalization: Z/p^M is a chain ring, so global
// minimal-valuation pivoting decides solvability exactly.
std::optional<std::vector<std::uint64_t>>
solve_xA_eq_b(std::vector<std::vector<std::uint64_t>> A, std::vector<std::uint64_t> b,
              std::uint64_t p, int modexp, std::uint64_t M) {
    const int q = static_cast<int>(A.size());
    const int ne = static_cast<int>(b.size());
    // R tracks row operations: A_cur = R * A_orig, solution x = y * R.
    std::vector<std::vector<std::uint64_t>> R(static_cast<std::size_t>(q),
                                              std::vector<std::uint64_t>(static_cast<std::size_t>(q), 0));
    for (int i = 0; i < q; ++i) R[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;

    const int steps = std::min(q, ne);
    int t = 0;
    for (; t < steps; ++t) {
        int bi = -1, bj = -1, bv = modexp;
        for (int i = t; i < q; ++i)
            for (int j = t; j < ne; ++j) {
                int v = val_mod(A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], p, modexp);
                if (v < bv) { bv = v; bi = i; bj = j; }
            }
        if (bi < 0) break; // remaining block is 0 mod p^M
        std::swap(A[static_cast<std::size_t>(t)], A[static_cast<std::size_t>(bi)]);
        std::swap(R[static_cast<std::size_t>(t)], R[static_cast<std::size_t>(bi)]);
        if (bj != t) {
            for (int i = 0; i < q; ++i)
                std::swap(A[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)],
                          A[static_cast<std::size_t>(i)][static_cast<std::size_t>(bj)]);
            std::swap(b[static_cast<std::size_t>(t)], b[static_cast<std::size_t>(bj)]);
        }
        std::uint64_t pk = 1;
        for (int i = 0; i < bv; ++i) pk *= p;
        const std::uint64_t unit = (A[static_cast<std::size_t>(t)][static_cast<std::size_t>(t)] / pk) % M;
        const std::uint64_t uinv = inv_mod(unit, M);
        // clear the pivot column below (rows > t; rows < t are already clear)
        for (int i = t + 1; i < q; ++i) {
            std::uint64_t x = A[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
            if (x == 0) continue;
            std::uint64_t f = mul_mod((x / pk) % M, uinv, M);
            for (int j = 0; j < ne; ++j) {
                std::uint64_t sub = mul_mod(f, A[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)], M);
                auto& cell = A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                cell = (cell + M - sub) % M;
            }
            for (int j = 0; j < q; ++j) {
                std::uint64_t sub = mul_mod(f, R[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)], M);
                auto& cell = R[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                cell = (cell + M - sub) % M;
            }
        }
        // clear the pivot row to the right (column ops recombine equations)
        for (int j = t + 1; j < ne; ++j) {
            std::uint64_t x = A[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)];
            if (x == 0) continue;
            std::uint64_t gfac = mul_mod((x / pk) % M, uinv, M);
            for (int i = 0; i < q; ++i) {
                std::uint64_t sub = mul_mod(gfac, A[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)], M);
                auto& cell = A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                cell = (cell + M - sub) % M;
            }
            std::uint64_t sub = mul_mod(gfac, b[static_cast<std::size_t>(t)], M);
            b[static_cast<std::size_t>(j)] = (b[static_cast<std::size_t>(j)] + M - sub) % M;
        }
    }
    // equations beyond the diagonal block must be trivial
    for (int j = t; j < ne; ++j)
        if (b[static_cast<std::size_t>(j)] % M != 0) return std::nullopt;
    std::vector<std::uint64_t> y(static_cast<std::size_t>(q), 0);
    for (int i = 0; i < t; ++i) {
        std::uint64_t d = A[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
        int v = val_mod(d, p, modexp);
        std::uint64_t pk = 1;
        for (int k = 0; k < v; ++k) pk *= p;
        if (b[static_cast<std::size_t>(i)] % pk != 0) return std::nullopt;
        std::uint64_t unit = (d / pk) % M;
        y[static_cast<std::size_t>(i)] = mul_mod(b[static_cast<std::size_t>(i)] / pk, inv_mod(unit, M), M);
    }
    std::vector<std::uint64_t> x(static_cast<std::size_t>(q), 0);
    for (int j = 0; j < q; ++j) {
        std::uint64_t s = 0;
        for (int i = 0; i < q; ++i)
            s = (s + mul_mod(y[static_cast<std::size_t>(i)], R[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], M)) % M;
        x[static_cast<std::size_t>(j)] = s;
    }
    return x;
}

} // namespace

std::optional<UpperUnipotent>
solve_left_unipotent(const PMatrix& g, int m, long long den_allowance) {
    const int n = g.n();
    const PrimeContext& ctx = g.ctx();
    const long long S = std::max<long long>(0, den_allowance);
    UpperUnipotent u(n, ctx);

    for (int i = n - 2; i >= 0; --i) {
        const int q = n - 1 - i;
        int maxscale = 0;
        for (int k = i; k < n; ++k)
            for (int j = 0; j < n; ++j) maxscale = std::max(maxscale, g.at(k, j).scale());
        const long long D = maxscale;
        const long long modexp = m + S + D;
        if (modexp > ctx.precision)
            throw PrecisionLoss("solve_left_unipotent: modulus exceeds working precision");
        const std::uint64_t M = ctx.p_pow(static_cast<int>(modexp));
        // unknown v_k = p^{-S} x_k multiplies row i+1+k of g; per column j:
        //   sum_k x_k (p^D g_{i+1+k,j}) == p^{S+D} (delta_{ij} - g_{ij})  mod p^{m+S+D}
        std::vector<std::vector<std::uint64_t>> A(static_cast<std::size_t>(q),
                                                  std::vector<std::uint64_t>(static_cast<std::size_t>(n), 0));
        std::vector<std::uint64_t> b(static_cast<std::size_t>(n), 0);
        for (int k = 0; k < q; ++k)
            for (int j = 0; j < n; ++j) {
                Padic e = g.at(i + 1 + k, j).shift(static_cast<int>(D));
                A[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] =
                    e.residue_mod_pk(static_cast<int>(modexp)) % M;
            }
        for (int j = 0; j < n; ++j) {
            Padic t = Padic::from_integer(j == i ? 1 : 0, ctx) - g.at(i, j);
            Padic e = t.shift(static_cast<int>(D + S));
            b[static_cast<std::size_t>(j)] = e.residue_mod_pk(static_cast<int>(modexp)) % M;
        }
        auto sol = solve_xA_eq_b(std::move(A), std::move(b), ctx.p, static_cast<int>(modexp), M);
        if (!sol) return std::nullopt;
        for (int k = 0; k < q; ++k) {
            auto num = static_cast<long long>((*sol)[static_cast<std::size_t>(k)]);
            u.at(i, i + 1 + k) = Padic::from_scaled(num, static_cast<int>(S), ctx);
        }
    }
    // exact re-verification is the soundness anchor
    PMatrix prod = u.to_matrix() * g;
    if (!in_Km(prod, m)) return std::nullopt;
    return u;
}

} // namespace kgl
