#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "kgl/padic.hpp"
#include "kgl/weyl.hpp"

namespace kgl {

// Dense n x n matrix over truncated p-adics, all entries in one context.
class PMatrix {
public:
    PMatrix(int n, const PrimeContext& ctx);

    int n() const { return n_; }
    const PrimeContext& ctx() const { return ctx_; }

    Padic& at(int i, int j) { return e_[static_cast<std::size_t>(i * n_ + j)]; }
    const Padic& at(int i, int j) const { return e_[static_cast<std::size_t>(i * n_ + j)]; }

    static PMatrix identity(int n, const PrimeContext& ctx);
    PMatrix operator*(const PMatrix& o) const;
    PMatrix transpose() const;
    // Adjugate-based exact inverse; NotInvertible if det vanishes.
    PMatrix inverse() const;
    Padic det() const;

    bool equals_at_precision(const PMatrix& o) const;
    int max_scale() const;

private:
    int n_;
    PrimeContext ctx_;
    std::vector<Padic> e_;
};

// Strictly-upper entries, implicit unit diagonal.
class UpperUnipotent {
public:
    UpperUnipotent(int n, const PrimeContext& ctx);

    int n() const { return n_; }
    Padic& at(int i, int j);             // 0-based, requires i < j
    const Padic& at(int i, int j) const;
    Padic superdiag(int i) const { return at(i, i + 1); } // u_{i+1} in 1-based terms

    PMatrix to_matrix() const;
    UpperUnipotent inverse() const;

    // Flattened class keys of the entries mod p^m (denominators <= p^ell),
    // row-major; the canonical orbit/representative ordering key.
    std::vector<std::uint64_t> class_keys(int ell, int m) const;

private:
    int n_;
    PrimeContext ctx_;
    std::vector<Padic> e_; // row-major strict upper, size n(n-1)/2
};

// Diagonal torus element diag(p^{e_i} v_i).
struct TorusDiag {
    std::vector<long long> exponents;
    std::vector<long long> units; // unit residues, given as integers coprime to p

    int n() const { return static_cast<int>(exponents.size()); }
    PMatrix to_matrix(const PrimeContext& ctx) const;
    Padic entry(int i, const PrimeContext& ctx) const;
    long long det_valuation() const;
};

// Exact power of p or zero; the value type of |minor| products.
struct PPower {
    bool zero = false;
    long long exp = 0; // value = p^exp when not zero

    static PPower null() { return PPower{true, 0}; }
    static PPower of(long long e) { return PPower{false, e}; }
    bool operator==(const PPower& o) const {
        return zero == o.zero && (zero || exp == o.exp);
    }
    double to_double(std::uint64_t p) const;
};

// det of the top-left r x r block, exact at working precision.
Padic principal_minor(const PMatrix& g, int r);

// Delta(g) = |prod_{r<n} Delta_r(g)^2 / Delta_n(g)^2|; 0 off the open cell.
// PrecisionLoss if some minor is 0 at precision without being exact zero.
PPower delta_big(const PMatrix& g);

// Modulus character of the Borel: delta(diag(a_i)) = |prod a_i^{n+1-2i}|.
PPower modulus_delta(const TorusDiag& a, std::uint64_t p);

// Bottom-row k x k minors: I = {n-k+1..n} fixed, J runs over k-subsets
// (columns as 0-based sorted lists).
std::map<std::vector<int>, Padic> bottom_minors(const PMatrix& g, int k);

// K_m membership: m >= 1 tests g - I entrywise in p^m; m = 0 tests
// GL_n(Z_p): integral entries and unit determinant.
bool in_Km(const PMatrix& g, int m);

// Bottom-minor criterion for g in N(Q_p) K_m-coset position:
// m >= 1: off-tail bottom minors in p^m Z_p, tail minors in 1 + p^m Z_p.
// m = 0 (oracle mode): per level all bottom minors integral, at least one unit.
bool nk_membership(const PMatrix& g, int m);

// Unique u, u' with g = u (w c) u' for the longest w, via unit-diagonal LU of
// (wc)^{-1} g. NotInBigCell when a pivot minor vanishes (no pivoting fallback).
std::pair<UpperUnipotent, UpperUnipotent>
bruhat_extract(const PMatrix& g, const WeylPerm& w, const TorusDiag& c);

// iota(g) = w_{G_n} (g^t)^{-1} w_{G_n}; an involution reversing the torus ladder.
PMatrix involution_iota(const PMatrix& g);

// The unique representative of v N(p^m Z_p) whose entries are the canonical
// grid numbers k p^{-ell}, k in [0, p^{ell+m}). Entrywise residues are only a
// class invariant on such representatives: reducing a general representative
// entry-by-entry ignores the cross terms of the N(p^m) action.
UpperUnipotent grid_normal_form(const UpperUnipotent& v, int ell, int m);

// Find an upper-unipotent u with u g in K_m, when one exists. This is the
// reconstruction half of cell enumeration: existence is equivalent to the
// bottom-minor congruences, and every returned u is re-verified exactly.
// den_allowance bounds the entry denominators of u (p^{-den_allowance} Z_p).
std::optional<UpperUnipotent>
solve_left_unipotent(const PMatrix& g, int m, long long den_allowance);

PMatrix weyl_matrix(const WeylPerm& w, const PrimeContext& ctx);

} // namespace kgl
