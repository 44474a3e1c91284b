#pragma once

#include <cstdint>
#include <vector>

#include "kgl/matrix.hpp"
#include "kgl/padic.hpp"

namespace kgl {

// Character parameter nu in p^{-m} Z_p \ {0} with p^{-m} <= |nu| <= p^m,
// given as the rational num / p^{den_exp}.
struct NuParam {
    long long num = 1;
    int den_exp = 0;

    Padic to_padic(const PrimeContext& ctx) const;
    long long valuation(std::uint64_t p) const; // v_p(num) - den_exp
};

// Full parameter pack of one Kloosterman sum at level m:
// torus c = diag(p^{a_1} v_1, p^{a_2-a_1} v_2, ..., p^{-a_{n-1}} v_n).
struct CellSpec {
    std::uint64_t p = 3;
    int n = 2;
    int m = 1;
    std::vector<long long> a;      // a_1..a_{n-1}
    std::vector<long long> units;  // v_1..v_n
    std::vector<NuParam> nu;       // psi parameters (defaults: all 1)
    std::vector<NuParam> nu_prime; // psi' parameters (defaults: all 1)
    int extra_precision = 0;       // headroom beyond the minor-exactness bound

    static CellSpec make(std::uint64_t p, int n, int m, std::vector<long long> a,
                         std::vector<long long> units = {});

    void validate() const;
    long long ell() const; // max exponent (0 when n = 1)
    PrimeContext context() const;
    TorusDiag torus() const;
    // det(w c) in 1 + p^m Z_p; otherwise the cell is provably empty.
    bool feasible() const;
    // units multiply to (-1)^{(n+1)(n+2)/2 + 1} (the germ-domain normalization).
    bool germ_normalized() const;
    // spec with reversed exponent ladder and transported units (iota image).
    CellSpec reversed() const;
};

// One Bruhat-cell representative x = u (w c) u'; u and u' are classes mod
// N(p^m Z_p) held as exact representatives.
struct CellElement {
    UpperUnipotent u;
    UpperUnipotent uprime;

    // canonical ordering key: flattened u' residue classes
    std::vector<std::uint64_t> key(int ell, int m) const { return uprime.class_keys(ell, m); }
};

} // namespace kgl
