#pragma once

#include <stdexcept>
#include <string>

namespace lyap {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// symbolic dynamics
struct NotPrimitive : Error { using Error::Error; };
struct GapTooSmall : Error { using Error::Error; };
struct IllegalWord : Error { using Error::Error; };

// cocycle algebra
struct NumericOverflow : Error { using Error::Error; };
struct Singular : Error { using Error::Error; };
struct ZeroVector : Error { using Error::Error; };

// lyapunov analysis
struct EigenFailure : Error { using Error::Error; };
struct ClusteredSpectrum : Error { using Error::Error; };
struct SlowDecay : Error { using Error::Error; };
struct BoundViolation : Error { using Error::Error; };
struct ConeEscape : Error { using Error::Error; };
struct HypothesisViolated : Error { using Error::Error; };

// irregular construction
struct NoGap : Error { using Error::Error; };
struct BudgetExceeded : Error { using Error::Error; };
struct CertificationFailed : Error { using Error::Error; };

// io / experiments
struct ParseError : Error { using Error::Error; };
struct HashMismatch : Error { using Error::Error; };
struct RecomputationMismatch : Error { using Error::Error; };

} // namespace lyap
