#include "kgl/cyclo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kgl {

CycloSum::CycloSum(std::uint64_t p, int order_exp) : p_(p), order_exp_(order_exp) {
    if (p < 2 || order_exp < 1) throw ConfigError("CycloSum: need p >= 2, L >= 1");
    order_ = 1;
    for (int i = 0; i < order_exp; ++i) {
        if (order_ > (1ull << 40) / p) throw ConfigError("CycloSum: p^L too large");
        order_ *= p;
    }
    c_.assign(static_cast<std::size_t>(order_), 0);
}

CycloSum CycloSum::root(std::uint64_t p, int order_exp, std::uint64_t exponent, long long weight) {
    CycloSum s(p, order_exp);
    s.accumulate(exponent, weight);
    return s;
}

CycloSum CycloSum::integer(std::uint64_t p, int order_exp, long long value) {
    return root(p, order_exp, 0, value);
}

void CycloSum::accumulate(std::uint64_t exponent, long long weight) {
    if (weight == 0) return;
    c_[static_cast<std::size_t>(exponent % order_)] += weight;
    canonical_ = false;
    if (++pending_ >= kCanonEvery) canonicalize();
}

void CycloSum::make_canonical_mut() {
    // subtract coeff * (zeta^a + zeta^{a + p^{L-1}} + ... ) = coeff * 0
    const std::uint64_t block = order_ / p_;
    for (std::uint64_t a = 0; a < block; ++a) {
        const long long t = c_[static_cast<std::size_t>(a + (p_ - 1) * block)];
        if (t == 0) continue;
        for (std::uint64_t j = 0; j < p_; ++j)
            c_[static_cast<std::size_t>(a + j * block)] -= t;
    }
    canonical_ = true;
    pending_ = 0;
}

void CycloSum::canonicalize() {
    if (!canonical_) make_canonical_mut();
}

CycloSum& CycloSum::operator+=(const CycloSum& o) {
    if (p_ != o.p_) throw ConfigError("CycloSum: mixed primes");
    if (order_exp_ != o.order_exp_) throw ConfigError("CycloSum: mixed orders, embed first");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    canonical_ = false;
    if (++pending_ >= kCanonEvery) canonicalize();
    return *this;
}

CycloSum CycloSum::operator+(const CycloSum& o) const {
    CycloSum r = *this;
    r += o;
    return r;
}

CycloSum CycloSum::operator-() const {
    CycloSum r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
}

CycloSum CycloSum::operator-(const CycloSum& o) const { return *this + (-o); }

CycloSum CycloSum::operator*(const CycloSum& o) const {
    if (p_ != o.p_ || order_exp_ != o.order_exp_)
        throw ConfigError("CycloSum: operands must share p and order");
    CycloSum r(p_, order_exp_);
    for (std::uint64_t i = 0; i < order_; ++i) {
        if (c_[i] == 0) continue;
        for (std::uint64_t j = 0; j < order_; ++j) {
            if (o.c_[j] == 0) continue;
            r.c_[static_cast<std::size_t>((i + j) % order_)] += c_[i] * o.c_[j];
        }
    }
    r.canonical_ = false;
    return r;
}

CycloSum CycloSum::scaled(long long k) const {
    CycloSum r = *this;
    for (auto& x : r.c_) x *= k;
    // integer scaling preserves the canonical form
    if (k == 0) r.canonical_ = true;
    return r;
}

CycloSum CycloSum::conj() const {
    CycloSum r(p_, order_exp_);
    for (std::uint64_t i = 0; i < order_; ++i) {
        if (c_[i] == 0) continue;
        r.c_[static_cast<std::size_t>((order_ - i) % order_)] += c_[i];
    }
    r.canonical_ = false;
    return r;
}

CycloSum CycloSum::embedded(int order_exp2) const {
    if (order_exp2 < order_exp_) throw ConfigError("CycloSum: cannot shrink order");
    if (order_exp2 == order_exp_) return *this;
    CycloSum r(p_, order_exp2);
    std::uint64_t mult = r.order_ / order_;
    for (std::uint64_t i = 0; i < order_; ++i)
        if (c_[i] != 0) r.c_[static_cast<std::size_t>(i * mult)] += c_[i];
    r.canonical_ = false;
    return r;
}

bool CycloSum::is_zero() const {
    CycloSum t = *this;
    t.canonicalize();
    return std::all_of(t.c_.begin(), t.c_.end(), [](long long x) { return x == 0; });
}

bool CycloSum::equals(const CycloSum& o) const {
    if (p_ != o.p_) return false;
    int L = std::max(order_exp_, o.order_exp_);
    CycloSum a = embedded(L), b = o.embedded(L);
    a.canonicalize();
    b.canonicalize();
    return a.c_ == b.c_;
}

CycloSum CycloSum::divided_by(long long k) const {
    if (k <= 0) throw ConfigError("divided_by: k must be positive");
    CycloSum t = *this;
    t.canonicalize();
    for (auto& x : t.c_) {
        if (x % k != 0) throw KglError("divided_by: coefficients not divisible");
        x /= k;
    }
    return t;
}

std::complex<double> CycloSum::complex_value() const {
    CycloSum t = *this;
    t.canonicalize();
    std::complex<double> z = 0.0;
    const double w = 2.0 * std::numbers::pi / static_cast<double>(order_);
    for (std::uint64_t i = 0; i < order_; ++i) {
        if (t.c_[i] == 0) continue;
        double ang = w * static_cast<double>(i);
        z += static_cast<double>(t.c_[i]) * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    return z;
}

double CycloSum::magnitude() const { return std::abs(complex_value()); }

std::vector<std::pair<std::uint64_t, long long>> CycloSum::terms() const {
    CycloSum t = *this;
    t.canonicalize();
    std::vector<std::pair<std::uint64_t, long long>> out;
    for (std::uint64_t i = 0; i < order_; ++i)
        if (t.c_[i] != 0) out.emplace_back(i, t.c_[i]);
    return out;
}

} // namespace kgl
