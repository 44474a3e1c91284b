#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <vector>

#include "kgl/cell.hpp"
#include "kgl/cyclo.hpp"
#include "kgl/matrix.hpp"
#include "kgl/weyl.hpp"

namespace kgl {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// Cocharacter of the diagonal torus as its valuation vector.
using Cocharacter = std::vector<long long>;

Cocharacter cocharacter_of_torus(const TorusDiag& a);

// Nonnegative integer weights on positive coroots e_i - e_j (1 <= i < j <= n).
struct CorootDecomposition {
    std::map<std::pair<int, int>, long long> weights;

    int kappa() const; // number of strictly positive coordinates
};

// All decompositions lambda = sum m_{i,j} (e_i - e_j), m_{i,j} >= 0, by
// depth-first search with prefix-sum feasibility pruning. Empty when lambda is
// not a nonnegative combination (prefix sums must stay >= 0 and total 0).
std::vector<CorootDecomposition> enumerate_decompositions(const Cocharacter& lambda);

std::uint64_t decomposition_count_R(const TorusDiag& a);

// Upper estimate R(a) <= prod_i (m_i + 1)^{i(n-i)} over the simple-coroot
// coordinates m_i (the prefix sums of lambda).
BigInt r_estimate_bound(const Cocharacter& lambda);

// O_{f_0}(a) = Delta^{-1/2}(a) * sum over decompositions of (1 - 1/p)^kappa;
// zero when lambda_a is not a nonnegative coroot combination.
BigRational orbital_integral_DR(const TorusDiag& a, std::uint64_t p);

// Independent oracle: #{u' in N(Q_p)/N(Z_p), entry denominators <= p^ell :
// w c u' in N(Q_p) GL_n(Z_p)} counted by the m = 0 bottom-minor criterion.
std::uint64_t orbital_bruteforce(const TorusDiag& a, std::uint64_t p,
                                 long long budget = 100'000'000);

// Relative-Shalika-germ value: CycloSum scaled by p^{-norm_exp}.
struct GermValue {
    CycloSum value;
    long long norm_exp = 0;      // normalization = p^{-norm_exp} = p^{-n(n-1)m/2}
    bool domain_normalized = true; // units satisfy the germ-domain sign convention

    double magnitude() const;
    bool equals(const GermValue& o) const; // cross-scaled exact comparison
};

// K_e^{w_{G_n}}(c) = p^{-n(n-1)m/2} Kl_p(psi^{-1}; c, w_{G_n}); the psi^{-1}
// sum is the coefficient-reversed (conjugate) psi sum.
GermValue germ_longest(const CellSpec& spec);

// K_e^{w'}(a) = prod of per-block longest-element germs at a common root
// order; block sizes must match the composition and block dets must be units.
GermValue germ_relevant(const RelevantWeyl& w, const std::vector<CellSpec>& blocks);

} // namespace kgl
