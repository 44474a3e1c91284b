#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "kgl/cell.hpp"
#include "kgl/cyclo.hpp"

namespace kgl {

struct EnumerationOptions {
    long long budget = 100'000'000; // hard candidate cap, Infeasible beyond
    int threads = 1;
};

// All elements of X(w_{G_n} c) = N(p^m)\(N wc N cap K_m)/N(p^m), one
// representative per double coset, ordered by the canonical u' key.
// Grid: u' entries over p^{-ell} Z_p / p^m Z_p with incremental bottom-minor
// pruning; u recovered by congruence solving and re-verified via in_Km.
std::vector<CellElement> enumerate_cell(const CellSpec& spec,
                                        const EnumerationOptions& opt = {});

// Kl_p(psi_p; c, w_{G_n}) = sum over X of psi(u(x)) psi'(u'(x)), exact.
CycloSum kloosterman_sum(const CellSpec& spec, const EnumerationOptions& opt = {});

// Kloosterman sum with a precomputed element list (shared enumeration).
CycloSum kloosterman_sum_of(const CellSpec& spec, const std::vector<CellElement>& cell);

// Restricted GL(2) sum
//   S_2(nu, nu'; p^ell) = sum_{lambda lambda' = 1 mod p^{ell+m}, lambda = 1 mod p^m}
//                           xi((nu lambda + nu' lambda') / p^ell).
CycloSum s2_restricted(const NuParam& nu, const NuParam& nu_prime, long long ell, int m,
                       const PrimeContext& ctx);
CycloSum s2_restricted(const Padic& nu, const Padic& nu_prime, long long ell, int m,
                       const PrimeContext& ctx);

// Character-expanded evaluation: (1/phi(p^m)) sum_{chi mod p^m} sum_{lambda
// lambda' = 1} xi(...) chi(lambda), with exact character values. Requires the
// phi(p^m)-th roots of unity to embed in +/- p-power roots, i.e. p in {2, 3}.
CycloSum s2_twisted_decomposition(const NuParam& nu, const NuParam& nu_prime, long long ell,
                                  int m, const PrimeContext& ctx);

// |V_{w_{G_n}}(ell)| = p^{(n-1) ell}; the set itself is streamed on demand.
std::uint64_t v_w_count(long long ell, int m, int n, std::uint64_t p);
// Visit every lambda-tuple of V_{w_{G_n}}(ell); tuples are residues mod p^{ell+m}.
void v_w_for_each(long long ell, int m, int n, std::uint64_t p,
                  const std::function<void(const std::vector<std::uint64_t>&)>& fn);

// Torus-orbit decomposition of X under T(1 + p^m Z_p); representatives are
// the lexicographically least u' residue vectors.
struct OrbitDecomposition {
    std::vector<CellElement> representatives;
    std::vector<std::uint64_t> orbit_sizes; // N(x), aligned with representatives
    std::uint64_t total() const;
};

OrbitDecomposition orbit_decompose(const CellSpec& spec, const EnumerationOptions& opt = {});
OrbitDecomposition orbit_decompose_of(const CellSpec& spec, const std::vector<CellElement>& cell);

// S_{w_{G_n}}(theta_x; ell), evaluated both directly over V_w(ell) and as the
// product of S_2 factors; the two must agree exactly (FactorizationMismatch
// signals an implementation bug). Returns the direct value.
CycloSum s_w_theta(const CellElement& x, const CellSpec& spec, long long ell);

// Lemma-level identity: |V|^{-1} sum_x N(x) S_w(theta_x; ell) == Kl_p, exact,
// compared after clearing the |V| denominator.
bool stevens_identity_check(const CellSpec& spec, const EnumerationOptions& opt = {});

} // namespace kgl
