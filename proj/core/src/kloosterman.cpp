#include "kgl/kloosterman.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <thread>

namespace kgl {

namespace {

struct EnumState {
    const CellSpec* spec;
    PrimeContext ctx;
    TorusDiag c;
    long long ell;
    std::atomic<long long>* budget_left;
    std::mutex* sink_mu;
    std::vector<CellElement>* sink;
};

void charge_budget(std::atomic<long long>& left, long long amount) {
    if (left.fetch_sub(amount, std::memory_order_relaxed) - amount < 0)
        throw Infeasible("enumeration budget exceeded");
}

// level-k bottom-minor congruences for g = wc u' (k < n; level n is the
// constant determinant handled by the feasibility pre-check)
bool level_ok(const PMatrix& g, int k, int m) {
    const int n = g.n();
    auto minors = bottom_minors(g, k);
    std::vector<int> tail(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) tail[static_cast<std::size_t>(i)] = n - k + i;
    for (const auto& [J, d] : minors) {
        if (J == tail) {
            if (!d.is_one_mod_pk(m)) return false;
        } else {
            if (!d.in_pk(m)) return false;
        }
    }
    return true;
}

// Enumerate u' rows top-down (row r of u' = bottom-(r+1)-th row of g),
// testing each level's minor congruences as soon as its support is complete.
struct RowEnumerator {
    EnumState& st;
    int n, m;
    UpperUnipotent uprime;
    PMatrix g;

    RowEnumerator(EnumState& s)
        : st(s), n(s.spec->n), m(s.spec->m), uprime(s.spec->n, s.ctx), g(s.spec->n, s.ctx) {
        // constant parts of g = wc u': row n-1-r of g is d_r * (u' row r)
        for (int r = 0; r < n; ++r) {
            Padic d = st.c.entry(r, st.ctx);
            g.at(n - 1 - r, r) = d; // u'_{rr} = 1
        }
    }

    void set_entry(int r, int j, const Padic& x) {
        uprime.at(r, j) = x;
        g.at(n - 1 - r, j) = st.c.entry(r, st.ctx) * x;
    }

    // domain of u' entry (r, j): residues of p^{-a_{r+1}} Z_p / p^m Z_p, with
    // the level-1 congruences folded in for row 0
    void entry_domain(int r, int j, std::vector<Padic>& out) const {
        out.clear();
        const long long ar = st.spec->a[static_cast<std::size_t>(r)];
        if (r == 0) {
            if (j == n - 1) {
                // p^{a_1} v_1 x in 1 + p^m: x = p^{-a_1} x'' with x'' = v_1^{-1} mod p^m
                std::uint64_t pm = st.ctx.p_pow(m);
                std::uint64_t vinv =
                    inv_mod(Padic::from_integer(st.spec->units[0], st.ctx).num() % pm, pm);
                std::uint64_t count = st.ctx.p_pow(static_cast<int>(ar));
                for (std::uint64_t t = 0; t < count; ++t) {
                    std::uint64_t num = vinv + pm * t;
                    out.push_back(Padic::from_scaled(static_cast<long long>(num),
                                                     static_cast<int>(ar), st.ctx));
                }
            } else {
                // p^{a_1} v_1 x in p^m: valuation >= m - a_1
                std::uint64_t count = st.ctx.p_pow(static_cast<int>(ar));
                for (std::uint64_t t = 0; t < count; ++t)
                    out.push_back(Padic::from_scaled(static_cast<long long>(t),
                                                     static_cast<int>(ar - m), st.ctx));
            }
        } else {
            std::uint64_t count = st.ctx.p_pow(static_cast<int>(ar + m));
            for (std::uint64_t t = 0; t < count; ++t)
                out.push_back(Padic::from_scaled(static_cast<long long>(t), static_cast<int>(ar), st.ctx));
        }
    }

    void finish_candidate() {
        charge_budget(*st.budget_left, 1);
        auto u = solve_left_unipotent(g, m, st.ell);
        if (!u) return;
        // constructive soundness: accepted elements reconstruct into K_m
        PMatrix x = u->to_matrix() * g;
        if (!in_Km(x, m)) return;
        std::lock_guard<std::mutex> lk(*st.sink_mu);
        st.sink->push_back(CellElement{*u, uprime});
    }

    void recurse_row(int r, int j) {
        if (r == n - 1) {
            finish_candidate();
            return;
        }
        if (j == r) { // row r complete: its level is r+1
            if (level_ok(g, r + 1, m)) recurse_row(r + 1, n - 1);
            return;
        }
        std::vector<Padic> dom;
        entry_domain(r, j, dom);
        for (const Padic& x : dom) {
            set_entry(r, j, x);
            recurse_row(r, j - 1);
        }
    }

    // entry-level split of the outermost coordinate for worker partitioning
    void run(int worker, int nworkers) {
        std::vector<Padic> dom;
        entry_domain(0, n - 1, dom);
        for (std::size_t i = 0; i < dom.size(); ++i) {
            if (static_cast<int>(i % static_cast<std::size_t>(nworkers)) != worker) continue;
            set_entry(0, n - 1, dom[i]);
            recurse_row(0, n - 2);
        }
    }
};

} // namespace

std::vector<CellElement> enumerate_cell(const CellSpec& spec, const EnumerationOptions& opt) {
    spec.validate();
    PrimeContext ctx = spec.context();
    std::vector<CellElement> out;
    if (spec.n == 1) {
        if (spec.feasible())
            out.push_back(CellElement{UpperUnipotent(1, ctx), UpperUnipotent(1, ctx)});
        return out;
    }
    if (!spec.feasible()) return out;
    for (long long ai : spec.a)
        if (ai < spec.m) return out; // leftmost-column minor p^{a_k} prod(v) cannot reach p^m
    std::atomic<long long> budget_left{opt.budget};
    std::mutex mu;
    EnumState st{&spec, ctx, spec.torus(), spec.ell(), &budget_left, &mu, &out};

    int nworkers = std::max(1, opt.threads);
    if (nworkers == 1) {
        RowEnumerator e(st);
        e.run(0, 1);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errs(static_cast<std::size_t>(nworkers));
        for (int w = 0; w < nworkers; ++w)
            pool.emplace_back([&, w] {
                try {
                    RowEnumerator e(st);
                    e.run(w, nworkers);
                } catch (...) {
                    errs[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        for (auto& t : pool) t.join();
        for (auto& e : errs)
            if (e) std::rethrow_exception(e);
    }
    // deterministic order regardless of partitioning
    const int ell = static_cast<int>(st.ell), m = spec.m;
    std::sort(out.begin(), out.end(), [&](const CellElement& x, const CellElement& y) {
        return x.key(ell, m) < y.key(ell, m);
    });
    return out;
}

CycloSum kloosterman_sum_of(const CellSpec& spec, const std::vector<CellElement>& cell) {
    PrimeContext ctx = spec.context();
    CycloSum s(spec.p, ctx.root_order_exp);
    for (const CellElement& x : cell) {
        Padic arg_u = Padic::zero(ctx);
        Padic arg_up = Padic::zero(ctx);
        for (int i = 0; i + 1 < spec.n; ++i) {
            arg_u += spec.nu[static_cast<std::size_t>(i)].to_padic(ctx) * x.u.superdiag(i);
            arg_up += spec.nu_prime[static_cast<std::size_t>(i)].to_padic(ctx) * x.uprime.superdiag(i);
        }
        std::uint64_t k = (xi_of(arg_u, ctx) + xi_of(arg_up, ctx)) % ctx.p_pow(ctx.root_order_exp);
        s.accumulate(k, 1);
    }
    s.canonicalize();
    return s;
}

CycloSum kloosterman_sum(const CellSpec& spec, const EnumerationOptions& opt) {
    return kloosterman_sum_of(spec, enumerate_cell(spec, opt));
}

CycloSum s2_restricted(const Padic& nu, const Padic& nu_prime, long long ell, int m,
                       const PrimeContext& ctx) {
    if (ell < 0) throw ConfigError("s2_restricted: ell >= 0");
    CycloSum s(ctx.p, ctx.root_order_exp);
    const std::uint64_t mod = ctx.p_pow(static_cast<int>(ell) + m);
    const std::uint64_t pm = ctx.p_pow(m);
    const std::uint64_t steps = ctx.p_pow(static_cast<int>(ell));
    for (std::uint64_t t = 0; t < steps; ++t) {
        std::uint64_t lambda = (1 + pm * t) % mod;
        std::uint64_t lambda_inv = inv_mod(lambda, mod);
        Padic arg = nu.mul_int(static_cast<long long>(lambda)) +
                    nu_prime.mul_int(static_cast<long long>(lambda_inv));
        arg = arg.shift(static_cast<int>(-ell));
        s.accumulate(xi_of(arg, ctx), 1);
    }
    s.canonicalize();
    return s;
}

CycloSum s2_restricted(const NuParam& nu, const NuParam& nu_prime, long long ell, int m,
                       const PrimeContext& ctx) {
    return s2_restricted(nu.to_padic(ctx), nu_prime.to_padic(ctx), ell, m, ctx);
}

namespace {

// chi(lambda) as sign * zeta_{p^L}^shift; defined only when the phi(p^m)-th
// roots lie in +/- p-power roots, i.e. p in {2, 3}.
struct UnitCharacterTable {
    std::uint64_t p;
    int m;
    int order_exp; // L
    std::uint64_t pm;
    std::uint64_t phi;
    // p odd: cyclic with generator g0, ind[] discrete logs. p = 2: lambda =
    // (-1)^s 5^t with (s, t) tabulated.
    std::vector<std::uint64_t> ind;
    std::vector<std::pair<int, std::uint64_t>> two_decomp;
    std::uint64_t cyc_u = 1;   // odd part p^{m-1} (p=3); 2^{m-2} (p=2)
    std::uint64_t beta = 0;    // zeta_phi = -zeta_u^beta (odd p)

    UnitCharacterTable(std::uint64_t p_, int m_, int L) : p(p_), m(m_), order_exp(L) {
        if (p != 2 && p != 3)
            throw TwistUnsupported("twisted decomposition needs phi(p^m)-th roots in +/- p-power "
                                   "roots of unity; only p in {2,3} is supported exactly");
        pm = 1;
        for (int i = 0; i < m; ++i) pm *= p;
        phi = pm / p * (p - 1);
        if (p == 3) {
            cyc_u = pm / 3; // 3^{m-1}
            beta = (1 + cyc_u) / 2 % cyc_u; // (1-u)/2 = (1+u)/2 mod u, u odd
            // find a primitive root mod 3^m
            std::uint64_t g0 = 2;
            for (;; ++g0) {
                if (g0 % 3 == 0) continue;
                std::uint64_t x = g0 % pm;
                std::uint64_t ordcount = 1;
                while (x != 1) { x = x * g0 % pm; ++ordcount; }
                if (ordcount == phi) break;
            }
            ind.assign(pm, 0);
            std::uint64_t x = 1;
            for (std::uint64_t e = 0; e < phi; ++e) {
                ind[static_cast<std::size_t>(x)] = e;
                x = x * g0 % pm;
            }
        } else {
            cyc_u = (m >= 2) ? pm / 4 : 1; // 2^{m-2}
            two_decomp.assign(pm, {0, 0});
            if (m == 1) {
                two_decomp[1] = {0, 0};
            } else {
                for (int s = 0; s < 2; ++s) {
                    std::uint64_t x = (s == 0) ? 1 : pm - 1;
                    for (std::uint64_t t = 0; t < cyc_u; ++t) {
                        two_decomp[static_cast<std::size_t>(x)] = {s, t};
                        x = x * 5 % pm;
                    }
                }
            }
        }
    }

    std::uint64_t num_characters() const { return phi; }

    // character index j in [0, phi); returns {sign, exponent shift mod p^L}
    std::pair<long long, std::uint64_t> value(std::uint64_t j, std::uint64_t lambda_mod_pm) const {
        if (p == 3) {
            std::uint64_t e = ind[static_cast<std::size_t>(lambda_mod_pm % pm)];
            std::uint64_t je = j * e;
            long long sign = (je % 2 == 0) ? 1 : -1;
            std::uint64_t shift = 0;
            if (cyc_u > 1) {
                std::uint64_t rot = (je % cyc_u) * (beta % cyc_u) % cyc_u;
                // zeta_u = zeta_{p^L}^{p^{L-(m-1)}}
                std::uint64_t lift = 1;
                for (int i = 0; i < order_exp - (m - 1); ++i) lift *= p;
                shift = rot * lift;
            }
            return {sign, shift};
        }
        // p = 2: j encodes (eps, jj) with eps = j & 1, jj = j >> 1
        auto [s, t] = two_decomp[static_cast<std::size_t>(lambda_mod_pm % pm)];
        std::uint64_t eps = j % 2, jj = j / 2;
        long long sign = ((eps * static_cast<std::uint64_t>(s)) % 2 == 0) ? 1 : -1;
        std::uint64_t shift = 0;
        if (cyc_u > 1) {
            std::uint64_t rot = (jj % cyc_u) * (t % cyc_u) % cyc_u;
            std::uint64_t lift = 1;
            for (int i = 0; i < order_exp - (m - 2); ++i) lift *= 2;
            shift = rot * lift;
        }
        return {sign, shift};
    }
};

} // namespace

CycloSum s2_twisted_decomposition(const NuParam& nu, const NuParam& nu_prime, long long ell,
                                  int m, const PrimeContext& ctx) {
    if (ell < 0) throw ConfigError("s2_twisted_decomposition: ell >= 0");
    UnitCharacterTable chars(ctx.p, m, ctx.root_order_exp);
    const std::uint64_t mod = ctx.p_pow(static_cast<int>(ell) + m);
    const std::uint64_t pm = ctx.p_pow(m);
    const std::uint64_t order = ctx.p_pow(ctx.root_order_exp);
    Padic nup = nu.to_padic(ctx), nupp = nu_prime.to_padic(ctx);
    CycloSum total(ctx.p, ctx.root_order_exp);
    for (std::uint64_t lambda = 1; lambda < mod; ++lambda) {
        if (lambda % ctx.p == 0) continue;
        std::uint64_t lambda_inv = inv_mod(lambda, mod);
        Padic arg = nup.mul_int(static_cast<long long>(lambda)) +
                    nupp.mul_int(static_cast<long long>(lambda_inv));
        std::uint64_t base = xi_of(arg.shift(static_cast<int>(-ell)), ctx);
        for (std::uint64_t j = 0; j < chars.num_characters(); ++j) {
            auto [sign, shift] = chars.value(j, lambda % pm);
            total.accumulate((base + shift) % order, sign);
        }
    }
    total.canonicalize();
    return total.divided_by(static_cast<long long>(chars.num_characters()));
}

std::uint64_t v_w_count(long long ell, int m, int n, std::uint64_t p) {
    (void)m;
    if (ell < 0) throw ConfigError("v_w_count: ell >= 0");
    std::uint64_t r = 1;
    for (int i = 0; i < (n - 1) * ell; ++i) r *= p;
    return r;
}

void v_w_for_each(long long ell, int m, int n, std::uint64_t p,
                  const std::function<void(const std::vector<std::uint64_t>&)>& fn) {
    std::uint64_t pm = 1;
    for (int i = 0; i < m; ++i) pm *= p;
    std::uint64_t mod = pm;
    for (int i = 0; i < ell; ++i) mod *= p;
    std::uint64_t steps = mod / pm; // p^ell choices per slot
    std::vector<std::uint64_t> lambda(static_cast<std::size_t>(n - 1), 1);
    std::function<void(int)> rec = [&](int slot) {
        if (slot == n - 1) {
            fn(lambda);
            return;
        }
        for (std::uint64_t t = 0; t < steps; ++t) {
            lambda[static_cast<std::size_t>(slot)] = (1 + pm * t) % mod;
            rec(slot + 1);
        }
    };
    rec(0);
}

std::uint64_t OrbitDecomposition::total() const {
    std::uint64_t s = 0;
    for (auto x : orbit_sizes) s += x;
    return s;
}

OrbitDecomposition orbit_decompose_of(const CellSpec& spec, const std::vector<CellElement>& cell) {
    OrbitDecomposition od;
    if (cell.empty()) return od;
    PrimeContext ctx = spec.context();
    const int n = spec.n, m = spec.m;
    const int ell = static_cast<int>(spec.ell());
    std::map<std::vector<std::uint64_t>, std::size_t> index;
    for (std::size_t i = 0; i < cell.size(); ++i) index.emplace(cell[i].key(ell, m), i);

    const std::uint64_t steps = ctx.p_pow(ell);
    const std::uint64_t pm = ctx.p_pow(m);
    std::vector<bool> visited(cell.size(), false);
    // s-vectors in T(1 + p^m Z_p) modulo scalars: fix s_n = 1
    std::vector<Padic> svec(static_cast<std::size_t>(n), Padic::one(ctx));

    std::function<void(int, std::vector<std::size_t>&)> apply_all = [&](int slot,
                                                                        std::vector<std::size_t>& orbit) {
        if (slot == n - 1) {
            const CellElement& base = cell[orbit.front()];
            UpperUnipotent tu(n, ctx);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    Padic scaled = base.uprime.at(i, j) * svec[static_cast<std::size_t>(i)];
                    tu.at(i, j) = scaled.div(svec[static_cast<std::size_t>(j)]);
                }
            // s u' s^{-1} is not a grid representative; normalize before keying
            tu = grid_normal_form(tu, ell, m);
            auto it = index.find(tu.class_keys(ell, m));
            if (it == index.end())
                throw KglError("orbit_decompose: torus action left the enumerated set");
            if (!visited[it->second]) {
                visited[it->second] = true;
                orbit.push_back(it->second);
            }
            return;
        }
        for (std::uint64_t t = 0; t < steps; ++t) {
            svec[static_cast<std::size_t>(slot)] =
                Padic::from_integer(static_cast<long long>(1 + pm * t), ctx);
            apply_all(slot + 1, orbit);
        }
    };

    for (std::size_t i = 0; i < cell.size(); ++i) {
        if (visited[i]) continue;
        visited[i] = true;
        std::vector<std::size_t> orbit{i};
        apply_all(0, orbit);
        od.representatives.push_back(cell[i]); // cell sorted: first hit is lex-least
        od.orbit_sizes.push_back(orbit.size());
    }
    return od;
}

OrbitDecomposition orbit_decompose(const CellSpec& spec, const EnumerationOptions& opt) {
    return orbit_decompose_of(spec, enumerate_cell(spec, opt));
}

CycloSum s_w_theta(const CellElement& x, const CellSpec& spec, long long ell) {
    PrimeContext ctx = spec.context();
    const int n = spec.n, m = spec.m;
    if (ell < spec.ell()) throw ConfigError("s_w_theta: ell must cover all cell denominators");
    if (ell + m > ctx.precision) throw ConfigError("s_w_theta: ell exceeds the working precision");
    const std::uint64_t order = ctx.p_pow(ctx.root_order_exp);
    const std::uint64_t mod = ctx.p_pow(static_cast<int>(ell) + m);

    // kappa values weighted by the character parameters: the orbit identity
    // holds verbatim with nu_i kappa_i in place of kappa_i, since the torus
    // action scales both the same way.
    std::vector<Padic> kap, kapp;
    for (int i = 0; i + 1 < n; ++i) {
        kap.push_back(spec.nu[static_cast<std::size_t>(i)].to_padic(ctx) * x.u.superdiag(i));
        kapp.push_back(spec.nu_prime[static_cast<std::size_t>(i)].to_padic(ctx) *
                       x.uprime.superdiag(i));
    }

    CycloSum direct(spec.p, ctx.root_order_exp);
    v_w_for_each(ell, m, n, spec.p, [&](const std::vector<std::uint64_t>& lambda) {
        std::uint64_t e = 0;
        for (int i = 0; i + 1 < n; ++i) {
            const std::uint64_t li = lambda[static_cast<std::size_t>(i)];
            e = (e + xi_of(kap[static_cast<std::size_t>(i)].mul_int(static_cast<long long>(li)),
                           ctx)) % order;
            // lambda'_i lambda_{n-i} = 1 (1-based): slot i pairs with slot n-1-i-1
            std::uint64_t lpi =
                inv_mod(lambda[static_cast<std::size_t>(n - 2 - i)], mod);
            e = (e + xi_of(kapp[static_cast<std::size_t>(i)].mul_int(static_cast<long long>(lpi)),
                           ctx)) % order;
        }
        direct.accumulate(e, 1);
    });
    direct.canonicalize();

    // product form: S_w(theta_x; ell) = prod_i S_2(p^ell kappa_i, p^ell kappa'_{n-i}; p^ell)
    CycloSum prod = CycloSum::integer(spec.p, ctx.root_order_exp, 1);
    for (int i = 0; i + 1 < n; ++i) {
        CycloSum f = s2_restricted(kap[static_cast<std::size_t>(i)].shift(static_cast<int>(ell)),
                                   kapp[static_cast<std::size_t>(n - 2 - i)].shift(static_cast<int>(ell)),
                                   ell, m, ctx);
        prod = prod * f;
    }
    prod.canonicalize();
    if (!direct.equals(prod))
        throw FactorizationMismatch("s_w_theta: direct sum and S_2 product disagree");
    return direct;
}

bool stevens_identity_check(const CellSpec& spec, const EnumerationOptions& opt) {
    auto cell = enumerate_cell(spec, opt);
    CycloSum kl = kloosterman_sum_of(spec, cell);
    auto od = orbit_decompose_of(spec, cell);
    const long long ell = std::max<long long>(spec.ell(), 1);
    PrimeContext ctx = spec.context();
    CycloSum lhs(spec.p, ctx.root_order_exp);
    for (std::size_t i = 0; i < od.representatives.size(); ++i) {
        CycloSum sw = s_w_theta(od.representatives[i], spec, ell);
        lhs += sw.scaled(static_cast<long long>(od.orbit_sizes[i]));
    }
    long long vcount = static_cast<long long>(v_w_count(ell, spec.m, spec.n, spec.p));
    CycloSum rhs = kl.scaled(vcount);
    return lhs.equals(rhs);
}

} // namespace kgl
