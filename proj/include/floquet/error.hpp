#pragma once

#include <stdexcept>
#include <string>

namespace floquet {

/// Invalid input: malformed model files, violated preconditions, bad flags.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The numerics could not deliver a trustworthy answer.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A Sambe state outside the degenerate subspace sits (almost) on resonance.
class NearResonanceError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

}  // namespace floquet
