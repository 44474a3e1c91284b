#pragma once

#include <stdexcept>
#include <string>

namespace kgl {

struct KglError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A value reduced to 0 at working precision without being a known exact zero,
// in a place where the distinction decides a congruence test.
struct PrecisionLoss : KglError {
    using KglError::KglError;
};

// Additive-character argument has a larger denominator than the root order covers.
struct ScaleOverflow : KglError {
    using KglError::KglError;
};

struct NotInBigCell : KglError {
    using KglError::KglError;
};

struct NotInvertible : KglError {
    using KglError::KglError;
};

// Enumeration exceeded the configured candidate budget.
struct Infeasible : KglError {
    using KglError::KglError;
};

struct BlockMismatch : KglError {
    using KglError::KglError;
};

struct DetNotUnit : KglError {
    using KglError::KglError;
};

// The direct Stevens sum and its S2-factor product disagree; both are exact,
// so this always indicates an implementation bug.
struct FactorizationMismatch : KglError {
    using KglError::KglError;
};

struct DegenerateDenominator : KglError {
    using KglError::KglError;
};

struct ConfigError : KglError {
    using KglError::KglError;
};

// Character values outside +/- p-power roots of unity cannot be represented
// in the exact cyclotomic accumulator (needed only by the twisted S2 route).
struct TwistUnsupported : KglError {
    using KglError::KglError;
};

} // namespace kgl
