#pragma once

#include <array>
#include <cstdint>

#include "kgl/cell.hpp"
#include "kgl/cyclo.hpp"
#include "kgl/kloosterman.hpp"

namespace kgl {

// Closed-form parameter pack of one GL(4) cell candidate. Entry values are
// exact representatives of u' = [[1,x,u,w],[.,1,y,v],[..,1,z],[...,1]];
// x = p^{-a} x', y = p^{-b} y', z = p^{-c} z', u = p^{-d} u', v = p^{-f} v',
// w = p^{-e} w' with e = s forced. A class that vanishes mod p^m is recorded
// with unit 0 and the exact-zero value.
struct GL4Param {
    Padic x, y, z, u, v, w;
    long long a = 0, b = 0, c = 0, d = 0, e = 0, f = 0;
    std::uint64_t xu = 0, yu = 0, zu = 0, uu = 0, vu = 0, wu = 0; // unit residues
    // derived congruence witnesses (populated by properties_filter)
    Padic mu, lambda, m_tilde, n_tilde, t_tilde, k_bound;

    static GL4Param from_entries(const Padic& x, const Padic& y, const Padic& z, const Padic& u,
                                 const Padic& v, const Padic& w, int m);
};

// Properties (1)-(10) as a filter over one candidate; exact at precision.
bool properties_filter(GL4Param& param, const CellSpec& spec);

// The six entries of u(x) by the closed forms; DegenerateDenominator when a
// divisor (w, uv - wy, xyz - xv - uz + w) vanishes at precision.
std::array<Padic, 6> left_unipotent_closed_form(const GL4Param& param, const CellSpec& spec);

// Multiplies out u . w_{G_4} c . u' and compares with the closed-form left
// side entry-by-entry, exact at precision.
bool verify_identity_gl4(const GL4Param& param, const CellSpec& spec);

struct GL4FastResult {
    CycloSum sum;
    std::uint64_t cell_size = 0;
    std::vector<std::vector<std::uint64_t>> keys; // u' class keys, sorted
};

// Kl via the closed-form parametrization; exact, equal to the generic
// enumeration wherever both run.
GL4FastResult kloosterman_gl4_fast_full(const CellSpec& spec, const EnumerationOptions& opt = {});
CycloSum kloosterman_gl4_fast(const CellSpec& spec, const EnumerationOptions& opt = {});

} // namespace kgl
