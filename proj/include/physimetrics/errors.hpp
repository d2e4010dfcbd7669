#pragma once

#include <stdexcept>
#include <string>

namespace physimetrics {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// 6D rotation cannot be orthonormalized (zero or parallel axes).
struct DegenerateRotation : Error {
  using Error::Error;
};

/// Input matrix fails the orthonormality / determinant check.
struct NotARotation : Error {
  using Error::Error;
};

/// Array dimensions disagree with the declared frame/joint layout.
struct ShapeMismatch : Error {
  using Error::Error;
};

/// Sequence too short for the requested temporal operation.
struct TooShort : Error {
  using Error::Error;
};

/// Input contains NaN or infinity where finite values are required.
struct NonFinite : Error {
  using Error::Error;
};

/// File or config could not be decoded; message carries file and offset.
struct ParseError : Error {
  using Error::Error;
};

/// Decoded data violates a structural invariant (names the offender).
struct InvariantViolation : Error {
  using Error::Error;
};

/// Covariance too degenerate for a Gaussian distance even after regularization.
struct RankDeficient : Error {
  using Error::Error;
};

/// Multi-person metric invoked on a single-person clip.
struct SinglePerson : Error {
  using Error::Error;
};

}  // namespace physimetrics
