#pragma once

#include <stdexcept>
#include <string>

namespace spark {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
  using Error::Error;
};

struct ConstraintViolation : Error {
  using Error::Error;
};

struct SingularConfiguration : Error {
  using Error::Error;
};

struct NonConvergence : Error {
  NonConvergence(const std::string& what, double residual)
      : Error(what), residual(residual) {}
  double residual;
};

struct DegenerateLever : Error {
  using Error::Error;
};

struct Unreachable : Error {
  using Error::Error;
};

struct EnvelopeViolation : Error {
  using Error::Error;
};

// Failure inside a sampled run; `index` is the failing sample.
struct SampleFailure : Error {
  SampleFailure(const std::string& what, std::size_t index)
      : Error(what), index(index) {}
  std::size_t index;
};

}  // namespace spark
