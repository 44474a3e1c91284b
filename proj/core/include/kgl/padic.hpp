#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "kgl/errors.hpp"

namespace kgl {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t mod);
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod);
// Inverse of a mod M for gcd(a, M) = 1; throws NotInvertible otherwise.
std::uint64_t inv_mod(std::uint64_t a, std::uint64_t mod);
bool is_prime_u64(std::uint64_t n);

// Truncated p-adic working context: residues live mod p^W, additive-character
// values in the p^L-th roots of unity.
struct PrimeContext {
    std::uint64_t p = 0;
    int precision = 0;       // W
    int root_order_exp = 0;  // L
    std::uint64_t pw = 0;    // p^W

    PrimeContext() = default;
    PrimeContext(std::uint64_t p_, int precision_, int root_order_exp_);

    std::uint64_t p_pow(int k) const; // p^k for 0 <= k <= W
    bool compatible(const PrimeContext& o) const {
        return p == o.p && precision == o.precision;
    }
};

// Working precision large enough that all n x n minor congruences mod p^m of
// entries with denominators <= p^ell stay exact (two guard digits).
int working_precision(int n, long long ell, int m);
// Root order covering xi-arguments of valuation >= -(ell + 2m).
int root_order(long long ell, int m);

// A truncated p-adic number: integer numerator mod p^W with an explicit
// power-of-p scale; value = num * p^{-scale}. Every value carries its honest
// absolute precision: the true value is congruent to the stored one modulo
// p^prec Z_p, so congruence tests either decide soundly or raise
// PrecisionLoss. The exact-zero flag separates "known 0" from "0 at this
// precision".
class Padic {
public:
    Padic() = default;

    static Padic zero(const PrimeContext& ctx);
    static Padic one(const PrimeContext& ctx);
    static Padic from_integer(long long v, const PrimeContext& ctx);
    // value = v * p^{-scale}
    static Padic from_scaled(long long v, int scale, const PrimeContext& ctx);
    // value = a / b; b nonzero.
    static Padic from_rational(long long a, long long b, const PrimeContext& ctx);

    const PrimeContext& ctx() const { return ctx_; }
    std::uint64_t num() const { return num_; }
    int scale() const { return scale_; }
    long long prec() const { return prec_; }
    bool is_exact_zero() const { return exact_zero_; }

    // True iff the residue vanishes at its precision (weaker than exact zero).
    bool is_zero_at_precision() const { return exact_zero_ || num_ == 0; }

    // Exact p-adic valuation; PrecisionLoss when the stored digits vanish
    // without the exact-zero flag.
    long long valuation() const;
    // Lower bound on the valuation, always available (prec when undecidable).
    long long valuation_lower_bound() const;
    // Decide "valuation == v" for v below the precision horizon.
    bool valuation_is(long long v) const;

    Padic operator+(const Padic& o) const;
    Padic operator-(const Padic& o) const;
    Padic operator-() const;
    Padic operator*(const Padic& o) const;
    Padic& operator+=(const Padic& o) { *this = *this + o; return *this; }
    Padic& operator-=(const Padic& o) { *this = *this - o; return *this; }
    Padic& operator*=(const Padic& o) { *this = *this * o; return *this; }

    Padic mul_int(long long k) const;
    // Division; the divisor's valuation must be decidable.
    Padic div(const Padic& o) const;
    Padic inv() const { return one(ctx_).div(*this); }
    // value * p^k (k of any sign); exact.
    Padic shift(int k) const;

    // Values agree modulo p^{min of the two precisions} (for freshly built
    // values this is p^{W - max(scale)} after rescaling).
    bool equals_at_precision(const Padic& o) const;
    // valuation >= k, i.e. value in p^k Z_p; sound or PrecisionLoss.
    bool in_pk(long long k) const;
    // value - 1 in p^k Z_p.
    bool is_one_mod_pk(long long k) const;

    // Residue of the (integral) value mod p^k as an integer in [0, p^k).
    std::uint64_t residue_mod_pk(int k) const;

    // Canonical key of the class value mod p^m Z_p among values with
    // valuation >= -ell: numerator at scale ell reduced mod p^{ell+m}.
    std::uint64_t class_key(int ell, int m) const;

    std::string str() const;

private:
    Padic(std::uint64_t num, int scale, long long prec, bool exact_zero, const PrimeContext& ctx);
    void fold_negative_scale();

    std::uint64_t num_ = 0;
    int scale_ = 0;
    long long prec_ = 0; // value known mod p^prec
    bool exact_zero_ = true;
    PrimeContext ctx_;
};

// Exponent k of the standard additive character: xi(x) = zeta_{p^L}^k with
// frac_p(x) = k / p^L; trivial on Z_p. The fractional digits of x are always
// exact, so this never depends on lost top digits.
std::uint64_t xi_of(const Padic& x, const PrimeContext& ctx);

} // namespace kgl
