#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "kgl/errors.hpp"

namespace kgl {

// Exact element of the group ring Z[zeta] for zeta = e^{2 pi i / p^L},
// stored as one integer coefficient per exponent class. Canonical form kills
// the vanishing sums of p-th roots: for every residue a mod p^{L-1} the
// coefficient at exponent a + (p-1) p^{L-1} is zero.
//
// Addition is the parallel-reduction merge: associative and commutative, so
// partial sums may be combined in any order.
class CycloSum {
public:
    CycloSum() = default;
    CycloSum(std::uint64_t p, int order_exp);

    static CycloSum zero(std::uint64_t p, int order_exp) { return CycloSum(p, order_exp); }
    static CycloSum root(std::uint64_t p, int order_exp, std::uint64_t exponent, long long weight = 1);
    static CycloSum integer(std::uint64_t p, int order_exp, long long value);

    std::uint64_t p() const { return p_; }
    int order_exp() const { return order_exp_; }
    std::uint64_t order() const { return order_; }

    // acc + weight * zeta^exponent (exponent reduced mod p^L).
    void accumulate(std::uint64_t exponent, long long weight);

    void canonicalize();
    bool is_canonical() const { return canonical_; }

    CycloSum& operator+=(const CycloSum& o);
    CycloSum operator+(const CycloSum& o) const;
    CycloSum operator-() const;
    CycloSum operator-(const CycloSum& o) const;
    CycloSum operator*(const CycloSum& o) const;
    CycloSum scaled(long long k) const;

    // Complex conjugate: coefficient index negation (psi -> psi^{-1}).
    CycloSum conj() const;

    // Re-embed at a larger root order L' >= L (exponent k -> k p^{L'-L}).
    CycloSum embedded(int order_exp2) const;

    bool is_zero() const;
    bool equals(const CycloSum& o) const;

    // Coefficient-exact division by a positive integer; throws if not divisible.
    CycloSum divided_by(long long k) const;

    // Float evaluation; absolute error <= (sum |coeff|) * 1e-12.
    std::complex<double> complex_value() const;
    double magnitude() const;

    // Nonzero (exponent, coefficient) pairs of the canonical form, exponent-sorted.
    std::vector<std::pair<std::uint64_t, long long>> terms() const;

private:
    void make_canonical_mut();

    std::uint64_t p_ = 0;
    std::uint64_t order_ = 0; // p^L
    int order_exp_ = 0;
    std::vector<long long> c_;
    bool canonical_ = true;
    int pending_ = 0; // accumulations since last canonicalization

    // eager canonicalization threshold
    static constexpr int kCanonEvery = 1 << 16;
};

} // namespace kgl
