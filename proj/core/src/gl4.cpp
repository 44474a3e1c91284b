#include "kgl/gl4.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

namespace kgl {

namespace {

struct Gl4Ctx {
    PrimeContext ctx;
    // ladder (s, r, t) = (a_1, a_2, a_3); appendix torus diag(a4, a3, a2, a1)
    long long s, r, t;
    Padic a4, a3, a2, a1; // torus entries top-left to bottom-right
    int m;

    explicit Gl4Ctx(const CellSpec& spec)
        : ctx(spec.context()),
          s(spec.a[0]), r(spec.a[1]), t(spec.a[2]),
          a4(spec.torus().entry(0, ctx)),
          a3(spec.torus().entry(1, ctx)),
          a2(spec.torus().entry(2, ctx)),
          a1(spec.torus().entry(3, ctx)),
          m(spec.m) {
        if (spec.n != 4) throw ConfigError("gl4: spec.n must be 4");
    }
};

// valuation decidable and equal to v?
bool val_is(const Padic& x, long long v) {
    if (x.is_exact_zero()) return false;
    return x.valuation_is(v);
}

} // namespace

GL4Param GL4Param::from_entries(const Padic& x_, const Padic& y_, const Padic& z_,
                                const Padic& u_, const Padic& v_, const Padic& w_, int m) {
    GL4Param p;
    p.x = x_; p.y = y_; p.z = z_; p.u = u_; p.v = v_; p.w = w_;
    auto split = [m](const Padic& e, long long& val, std::uint64_t& unit) {
        if (e.is_exact_zero() || e.is_zero_at_precision()) {
            val = -static_cast<long long>(m);
            unit = 0;
            return;
        }
        long long v = e.valuation();
        val = -v;
        unit = e.shift(static_cast<int>(-v)).num();
    };
    split(p.x, p.a, p.xu);
    split(p.y, p.b, p.yu);
    split(p.z, p.c, p.zu);
    split(p.u, p.d, p.uu);
    split(p.v, p.f, p.vu);
    split(p.w, p.e, p.wu);
    return p;
}

bool properties_filter(GL4Param& q, const CellSpec& spec) {
    Gl4Ctx g(spec);
    const int m = g.m;
    // (3): the (1,4) entry has exact valuation -s with a4 w in 1 + p^m
    if (!val_is(q.w, -g.s)) return false;
    if (!(g.a4 * q.w).is_one_mod_pk(m)) return false;
    // (4), (5), (8), (10): denominator caps a,d <= s-m; f,b <= r-m; c <= t-m
    if (!q.x.in_pk(m - g.s) || !q.u.in_pk(m - g.s)) return false;
    if (!q.v.in_pk(m - g.r) || !q.y.in_pk(m - g.r)) return false;
    if (!q.z.in_pk(m - g.t)) return false;
    q.k_bound = q.y.shift(static_cast<int>(g.r)); // p^r v3 v4 y in p^m, unit part aside

    // D = xyz - xv - uz + w must carry the full a1-valuation -t
    Padic D = q.x * q.y * q.z - q.x * q.v - q.u * q.z + q.w;
    if (!val_is(D, -g.t)) return false;
    // (1): -a1 / D in 1 + p^m  <=>  val(-a1 - D) >= m + val(D);
    // the recorded witness is mu = -D / a1 = p^t v_1^{-1} (xv + uz - xyz - w)
    if (!((-g.a1) - D).in_pk(m - g.t)) return false;
    q.mu = (-D).div(g.a1);
    // E = uv - wy must carry val(a2 D) = -r
    Padic E = q.u * q.v - q.w * q.y;
    if (!val_is(E, -g.r)) return false;
    // (2): a2 D / E in 1 + p^m; recorded as lambda = -E / (a1 a2)
    if (!(g.a2 * D - E).in_pk(m - g.r)) return false;
    q.lambda = (-E).div(g.a1 * g.a2);
    // (6): m~ = p^r (xv - w) in p^m
    q.m_tilde = (q.x * q.v - q.w).shift(static_cast<int>(g.r));
    if (!q.m_tilde.in_pk(m)) return false;
    // (7): n~ = p^t (yz - v) in p^m
    q.n_tilde = (q.y * q.z - q.v).shift(static_cast<int>(g.t));
    if (!q.n_tilde.in_pk(m)) return false;
    // (9): t~ = p^r (xy - u) in p^m
    q.t_tilde = (q.x * q.y - q.u).shift(static_cast<int>(g.r));
    if (!q.t_tilde.in_pk(m)) return false;
    return true;
}

std::array<Padic, 6> left_unipotent_closed_form(const GL4Param& q, const CellSpec& spec) {
    Gl4Ctx g(spec);
    Padic D = q.x * q.y * q.z - q.x * q.v - q.u * q.z + q.w;
    Padic E = q.u * q.v - q.w * q.y;
    auto degenerate = [](const Padic& d) {
        return d.is_exact_zero() || d.is_zero_at_precision();
    };
    if (degenerate(D) || degenerate(E) || degenerate(q.w))
        throw DegenerateDenominator("gl4 closed form: vanishing denominator");
    Padic u1 = (g.a1 * (q.u - q.x * q.y)).div(g.a2 * D);
    Padic u2 = (g.a2 * (q.w - q.u * q.z)).div(g.a3 * E);
    Padic u3 = (-(g.a3 * q.v)).div(g.a4 * q.w);
    Padic u4 = (g.a1 * q.x).div(g.a3 * D);
    Padic u5 = (g.a2 * (q.y * q.z - q.v)).div(g.a4 * E);
    Padic u6 = (-g.a1).div(g.a4 * D);
    return {u1, u2, u3, u4, u5, u6};
}

bool verify_identity_gl4(const GL4Param& q, const CellSpec& spec) {
    Gl4Ctx g(spec);
    auto us = left_unipotent_closed_form(q, spec);
    const PrimeContext& ctx = g.ctx;

    Padic D = q.x * q.y * q.z - q.x * q.v - q.u * q.z + q.w;
    Padic E = q.u * q.v - q.w * q.y;
    PMatrix lhs(4, ctx);
    lhs.at(0, 0) = (-g.a1).div(D);
    lhs.at(1, 0) = (g.a2 * (q.y * q.z - q.v)).div(E);
    lhs.at(1, 1) = (g.a2 * D).div(E);
    lhs.at(2, 0) = (-(g.a3 * q.v)).div(q.w);
    lhs.at(2, 1) = (g.a3 * (q.w - q.x * q.v)).div(q.w);
    lhs.at(2, 2) = (-(g.a3 * E)).div(q.w); // a3 (wy - uv) / w
    lhs.at(3, 0) = g.a4;
    lhs.at(3, 1) = g.a4 * q.x;
    lhs.at(3, 2) = g.a4 * q.u;
    lhs.at(3, 3) = g.a4 * q.w;

    UpperUnipotent un(4, ctx), up(4, ctx);
    un.at(0, 1) = us[0];
    un.at(1, 2) = us[1];
    un.at(2, 3) = us[2];
    un.at(0, 2) = us[3];
    un.at(1, 3) = us[4];
    un.at(0, 3) = us[5];
    up.at(0, 1) = q.x;
    up.at(0, 2) = q.u;
    up.at(0, 3) = q.w;
    up.at(1, 2) = q.y;
    up.at(1, 3) = q.v;
    up.at(2, 3) = q.z;

    PMatrix rhs = un.to_matrix() * weyl_matrix(WeylPerm::longest(4), ctx) *
                  spec.torus().to_matrix(ctx) * up.to_matrix();
    return lhs.equals_at_precision(rhs);
}

GL4FastResult kloosterman_gl4_fast_full(const CellSpec& spec, const EnumerationOptions& opt) {
    spec.validate();
    if (spec.n != 4) throw ConfigError("kloosterman_gl4_fast: n must be 4");
    Gl4Ctx g(spec);
    const PrimeContext& ctx = g.ctx;
    const int m = g.m;
    GL4FastResult out;
    out.sum = CycloSum(spec.p, ctx.root_order_exp);
    if (!spec.feasible() || g.s < m || g.r < m || g.t < m) return out;

    const std::uint64_t order = ctx.p_pow(ctx.root_order_exp);
    const std::uint64_t pm = ctx.p_pow(m);
    // domains: residues of p^{val-cap} Z_p / p^m Z_p per entry
    auto domain = [&](long long cap) {
        std::vector<Padic> d;
        std::uint64_t cnt = ctx.p_pow(static_cast<int>(cap));
        d.reserve(cnt);
        for (std::uint64_t k = 0; k < cnt; ++k)
            d.push_back(Padic::from_scaled(static_cast<long long>(k),
                                           static_cast<int>(cap - m), ctx));
        return d;
    };
    std::vector<Padic> xs = domain(g.s), us = domain(g.s);
    std::vector<Padic> ys = domain(g.r), vs = domain(g.r);
    std::vector<Padic> zs = domain(g.t);
    // w = p^{-s} w'' with w'' = v_1^{-1} mod p^m
    std::vector<Padic> ws;
    {
        std::uint64_t vinv = inv_mod(Padic::from_integer(spec.units[0], ctx).num() % pm, pm);
        std::uint64_t cnt = ctx.p_pow(static_cast<int>(g.s));
        for (std::uint64_t k = 0; k < cnt; ++k)
            ws.push_back(Padic::from_scaled(static_cast<long long>(vinv + pm * k),
                                            static_cast<int>(g.s), ctx));
    }

    std::atomic<long long> budget_left{opt.budget};
    std::mutex mu_sink;
    Padic nu1 = spec.nu[0].to_padic(ctx), nu2 = spec.nu[1].to_padic(ctx),
          nu3 = spec.nu[2].to_padic(ctx);
    Padic np1 = spec.nu_prime[0].to_padic(ctx), np2 = spec.nu_prime[1].to_padic(ctx),
          np3 = spec.nu_prime[2].to_padic(ctx);

    auto worker = [&](int wid, int nworkers, CycloSum& acc,
                      std::vector<std::vector<std::uint64_t>>& keys) {
        for (std::size_t ix = 0; ix < xs.size(); ++ix) {
            if (static_cast<int>(ix % static_cast<std::size_t>(nworkers)) != wid) continue;
            const Padic& x = xs[ix];
            for (const Padic& y : ys)
                for (const Padic& z : zs)
                    for (const Padic& u : us)
                        for (const Padic& v : vs)
                            for (const Padic& w : ws) {
                                if (budget_left.fetch_sub(1, std::memory_order_relaxed) <= 0)
                                    throw Infeasible("gl4 fast budget exceeded");
                                GL4Param q = GL4Param::from_entries(x, y, z, u, v, w, m);
                                if (!properties_filter(q, spec)) continue;
                                auto uvec = left_unipotent_closed_form(q, spec);
                                Padic argu = nu1 * uvec[0] + nu2 * uvec[1] + nu3 * uvec[2];
                                Padic argp = np1 * x + np2 * y + np3 * z;
                                std::uint64_t e = (xi_of(argu, ctx) + xi_of(argp, ctx)) % order;
                                acc.accumulate(e, 1);
                                UpperUnipotent up(4, ctx);
                                up.at(0, 1) = x; up.at(0, 2) = u; up.at(0, 3) = w;
                                up.at(1, 2) = y; up.at(1, 3) = v; up.at(2, 3) = z;
                                keys.push_back(up.class_keys(static_cast<int>(spec.ell()), m));
                            }
        }
    };

    int nworkers = std::max(1, opt.threads);
    if (nworkers == 1) {
        worker(0, 1, out.sum, out.keys);
    } else {
        std::vector<CycloSum> accs(static_cast<std::size_t>(nworkers),
                                   CycloSum(spec.p, ctx.root_order_exp));
        std::vector<std::vector<std::vector<std::uint64_t>>> keysv(static_cast<std::size_t>(nworkers));
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errs(static_cast<std::size_t>(nworkers));
        for (int widx = 0; widx < nworkers; ++widx)
            pool.emplace_back([&, widx] {
                try {
                    worker(widx, nworkers, accs[static_cast<std::size_t>(widx)],
                           keysv[static_cast<std::size_t>(widx)]);
                } catch (...) {
                    errs[static_cast<std::size_t>(widx)] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errs)
            if (e) std::rethrow_exception(e);
        for (int widx = 0; widx < nworkers; ++widx) {
            out.sum += accs[static_cast<std::size_t>(widx)];
            auto& kv = keysv[static_cast<std::size_t>(widx)];
            out.keys.insert(out.keys.end(), kv.begin(), kv.end());
        }
    }
    out.sum.canonicalize();
    std::sort(out.keys.begin(), out.keys.end());
    out.cell_size = out.keys.size();
    return out;
}

CycloSum kloosterman_gl4_fast(const CellSpec& spec, const EnumerationOptions& opt) {
    return kloosterman_gl4_fast_full(spec, opt).sum;
}

} // namespace kgl
