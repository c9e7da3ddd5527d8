#ifndef QVI_ERRORS_HPP
#define QVI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qvi {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

// Gram matrix not symmetric positive definite.
struct NotSpd : Error {
  using Error::Error;
};

// A smallness/coercivity precondition does not hold.
struct ConditionViolated : Error {
  using Error::Error;
};

struct NotContraction : Error {
  using Error::Error;
};

struct MaxIterations : Error {
  using Error::Error;
};

struct SolverFailure : Error {
  using Error::Error;
};

// Supplied multiplier is not a valid normal-cone element.
struct InvalidMultiplier : Error {
  using Error::Error;
};

struct InfeasiblePoint : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace qvi

#endif
