#include "kgl/padic.hpp"

#include <algorithm>
#include <sstream>

namespace kgl {

namespace {
constexpr long long kInfPrec = 1ll << 40;
}

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t mod) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % mod);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
    std::uint64_t r = 1 % mod;
    base %= mod;
    while (exp) {
        if (exp & 1) r = mul_mod(r, base, mod);
        base = mul_mod(base, base, mod);
        exp >>= 1;
    }
    return r;
}

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t mod) {
    __int128 t = 0, newt = 1;
    __int128 r = static_cast<__int128>(mod), newr = static_cast<__int128>(a % mod);
    while (newr != 0) {
        __int128 q = r / newr;
        __int128 tmp = t - q * newt;
        t = newt;
        newt = tmp;
        tmp = r - q * newr;
        r = newr;
        newr = tmp;
    }
    if (r != 1) throw NotInvertible("inv_mod: not a unit");
    if (t < 0) t += mod;
    return static_cast<std::uint64_t>(t);
}

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % q == 0) return n == q;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 0; i < s - 1; ++i) {
            x = mul_mod(x, x, n);
            if (x == n - 1) { witness = false; break; }
        }
        if (witness) return false;
    }
    return true;
}

PrimeContext::PrimeContext(std::uint64_t p_, int precision_, int root_order_exp_)
    : p(p_), precision(precision_), root_order_exp(root_order_exp_) {
    if (!is_prime_u64(p)) throw ConfigError("PrimeContext: p must be prime");
    if (precision < 1 || root_order_exp < 1) throw ConfigError("PrimeContext: W >= 1 and L >= 1 required");
    pw = 1;
    for (int i = 0; i < precision; ++i) {
        if (pw > (std::uint64_t(1) << 62) / p)
            throw ConfigError("PrimeContext: p^W exceeds 63-bit range, lower W or p");
        pw *= p;
    }
}

std::uint64_t PrimeContext::p_pow(int k) const {
    std::uint64_t r = 1;
    for (int i = 0; i < k; ++i) r *= p;
    return r;
}

int working_precision(int n, long long ell, int m) {
    if (ell < 0) ell = 0;
    return static_cast<int>(n * (ell + m) + m + 2);
}

int root_order(long long ell, int m) {
    if (ell < 0) ell = 0;
    return static_cast<int>(ell + 2 * m);
}

Padic::Padic(std::uint64_t num, int scale, long long prec, bool exact_zero, const PrimeContext& ctx)
    : num_(num % ctx.pw), scale_(scale), prec_(prec), exact_zero_(exact_zero), ctx_(ctx) {
    if (exact_zero_) {
        num_ = 0;
        scale_ = 0;
        prec_ = kInfPrec;
        return;
    }
    fold_negative_scale();
    prec_ = std::min(prec_, static_cast<long long>(ctx_.precision - scale_));
}

void Padic::fold_negative_scale() {
    for (; scale_ < 0; ++scale_) num_ = mul_mod(num_, ctx_.p, ctx_.pw);
}

Padic Padic::zero(const PrimeContext& ctx) { return Padic(0, 0, kInfPrec, true, ctx); }

Padic Padic::one(const PrimeContext& ctx) { return Padic(1, 0, kInfPrec, false, ctx); }

Padic Padic::from_integer(long long v, const PrimeContext& ctx) {
    if (v == 0) return zero(ctx);
    __int128 r = static_cast<__int128>(v) % static_cast<__int128>(ctx.pw);
    if (r < 0) r += ctx.pw;
    return Padic(static_cast<std::uint64_t>(r), 0, kInfPrec, false, ctx);
}

Padic Padic::from_scaled(long long v, int scale, const PrimeContext& ctx) {
    if (v == 0) return zero(ctx);
    Padic x = from_integer(v, ctx);
    return x.shift(-scale);
}

Padic Padic::from_rational(long long a, long long b, const PrimeContext& ctx) {
    if (b == 0) throw ConfigError("from_rational: zero denominator");
    if (a == 0) return zero(ctx);
    int s = 0;
    long long bb = b;
    while (bb % static_cast<long long>(ctx.p) == 0) {
        bb /= static_cast<long long>(ctx.p);
        ++s;
    }
    Padic q = from_integer(a, ctx).div(from_integer(bb, ctx));
    return q.shift(-s);
}

long long Padic::valuation() const {
    if (exact_zero_) throw PrecisionLoss("valuation of exact zero");
    if (num_ == 0) throw PrecisionLoss("valuation of a value that is 0 at precision");
    long long v = 0;
    std::uint64_t n = num_;
    while (n % ctx_.p == 0) { n /= ctx_.p; ++v; }
    v -= scale_;
    if (v >= prec_) throw PrecisionLoss("valuation beyond the precision horizon");
    return v;
}

long long Padic::valuation_lower_bound() const {
    if (exact_zero_) return kInfPrec;
    if (num_ == 0) return prec_;
    long long v = 0;
    std::uint64_t n = num_;
    while (n % ctx_.p == 0) { n /= ctx_.p; ++v; }
    return std::min(v - scale_, prec_);
}

bool Padic::valuation_is(long long v) const {
    if (exact_zero_) return false;
    if (v >= prec_) throw PrecisionLoss("valuation_is beyond the precision horizon");
    if (num_ == 0) return false; // true valuation >= prec > v
    long long vv = 0;
    std::uint64_t n = num_;
    while (n % ctx_.p == 0) { n /= ctx_.p; ++vv; }
    vv -= scale_;
    if (vv >= prec_) return false;
    return vv == v;
}

Padic Padic::operator+(const Padic& o) const {
    if (!ctx_.compatible(o.ctx_)) throw ConfigError("Padic: mixed contexts");
    if (exact_zero_) return o;
    if (o.exact_zero_) return *this;
    int s = std::max(scale_, o.scale_);
    std::uint64_t an = num_, bn = o.num_;
    for (int i = scale_; i < s; ++i) an = mul_mod(an, ctx_.p, ctx_.pw);
    for (int i = o.scale_; i < s; ++i) bn = mul_mod(bn, ctx_.p, ctx_.pw);
    std::uint64_t n = an + bn;
    if (n >= ctx_.pw) n -= ctx_.pw;
    return Padic(n, s, std::min(prec_, o.prec_), false, ctx_);
}

Padic Padic::operator-() const {
    if (exact_zero_) return *this;
    Padic r = *this;
    r.num_ = (num_ == 0) ? 0 : ctx_.pw - num_;
    return r;
}

Padic Padic::operator-(const Padic& o) const { return *this + (-o); }

Padic Padic::operator*(const Padic& o) const {
    if (!ctx_.compatible(o.ctx_)) throw ConfigError("Padic: mixed contexts");
    if (exact_zero_ || o.exact_zero_) return zero(ctx_);
    long long prec = std::min(valuation_lower_bound() + o.prec_,
                              o.valuation_lower_bound() + prec_);
    return Padic(mul_mod(num_, o.num_, ctx_.pw), scale_ + o.scale_, prec, false, ctx_);
}

Padic Padic::mul_int(long long k) const { return *this * from_integer(k, ctx_); }

Padic Padic::div(const Padic& o) const {
    if (o.is_exact_zero()) throw NotInvertible("division by exact zero");
    long long v = o.valuation(); // PrecisionLoss when undecidable
    std::uint64_t unit = o.num_;
    for (long long i = 0; i < v + o.scale_; ++i) unit /= ctx_.p;
    std::uint64_t uinv = inv_mod(unit, ctx_.pw);
    if (exact_zero_) return zero(ctx_);
    // 1/o carries precision prec(o) - 2 v and valuation -v
    long long prec_inv = o.prec_ - 2 * v;
    long long prec = std::min(valuation_lower_bound() + prec_inv, (-v) + prec_);
    Padic r(mul_mod(num_, uinv, ctx_.pw), scale_, prec + v /* pre-shift */, false, ctx_);
    // r currently holds (num * unit^{-1}) p^{-scale}; true quotient adds p^{-v}
    return r.shift(static_cast<int>(-v));
}

Padic Padic::shift(int k) const {
    if (exact_zero_) return *this;
    Padic r = *this;
    r.scale_ -= k;
    r.prec_ += k;
    r.fold_negative_scale();
    r.prec_ = std::min(r.prec_, static_cast<long long>(ctx_.precision - r.scale_));
    return r;
}

bool Padic::equals_at_precision(const Padic& o) const {
    Padic d = *this - o;
    if (d.is_exact_zero()) return true;
    return d.in_pk(std::min(d.prec_, static_cast<long long>(ctx_.precision)));
}

bool Padic::in_pk(long long k) const {
    if (exact_zero_) return true;
    if (k <= valuation_lower_bound()) return true;
    if (k <= prec_) {
        // digits below k are exact: reduce to a congruence on the numerator
        long long digits = k + scale_;
        if (digits <= 0) return true;
        if (digits > ctx_.precision) throw PrecisionLoss("in_pk beyond representation");
        return num_ % ctx_.p_pow(static_cast<int>(digits)) == 0;
    }
    // k above the horizon: decidable only when a nonzero digit sits below it
    long long vlb = valuation_lower_bound();
    if (num_ != 0 && vlb < prec_) return false;
    throw PrecisionLoss("in_pk: 0 at precision with insufficient headroom");
}

bool Padic::is_one_mod_pk(long long k) const { return (*this - one(ctx_)).in_pk(k); }

std::uint64_t Padic::residue_mod_pk(int k) const {
    if (k < 0 || k > ctx_.precision) throw ConfigError("residue_mod_pk: bad k");
    if (exact_zero_) return 0;
    if (k > prec_) throw PrecisionLoss("residue_mod_pk beyond the precision horizon");
    if (scale_ > 0) {
        if (num_ % ctx_.p_pow(scale_) != 0)
            throw PrecisionLoss("residue_mod_pk: value not integral");
        std::uint64_t n = num_ / ctx_.p_pow(scale_);
        return n % ctx_.p_pow(k);
    }
    return num_ % ctx_.p_pow(k);
}

std::uint64_t Padic::class_key(int ell, int m) const {
    if (exact_zero_) return 0;
    if (m > prec_) throw PrecisionLoss("class_key: precision below the class level");
    std::uint64_t n = num_;
    if (scale_ <= ell) {
        for (int i = scale_; i < ell; ++i) n = mul_mod(n, ctx_.p, ctx_.pw);
    } else {
        std::uint64_t drop = ctx_.p_pow(scale_ - ell);
        if (n % drop != 0) throw PrecisionLoss("class_key: denominator exceeds ell");
        n /= drop;
    }
    return n % ctx_.p_pow(ell + m);
}

std::string Padic::str() const {
    std::ostringstream os;
    if (exact_zero_) return "0";
    os << num_;
    if (scale_ != 0) os << "/" << ctx_.p << "^" << scale_;
    return os.str();
}

std::uint64_t xi_of(const Padic& x, const PrimeContext& ctx) {
    if (x.is_exact_zero()) return 0;
    if (x.prec() < 0) throw PrecisionLoss("xi_of: fractional digits not exact");
    int s = x.scale();
    if (s <= 0) return 0; // integral, xi trivial on Z_p
    std::uint64_t frac = x.num() % ctx.p_pow(s);
    // the fractional digits are exact; reduce the denominator soundly
    while (s > ctx.root_order_exp) {
        if (frac % ctx.p != 0) throw ScaleOverflow("xi_of: scale exceeds root order L, raise L");
        frac /= ctx.p;
        --s;
    }
    std::uint64_t k = frac % ctx.p_pow(s);
    for (int i = s; i < ctx.root_order_exp; ++i) k *= ctx.p;
    return k % ctx.p_pow(ctx.root_order_exp);
}

} // namespace kgl
