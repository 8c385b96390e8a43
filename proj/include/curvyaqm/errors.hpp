#pragma once

#include <stdexcept>
#include <string>

namespace curvyaqm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument outside the domain of a formula (negative delay, p = 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The operation has no meaning for this kind of curve, e.g. asking a
/// delay clamp for its delay-to-probability map.
class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

/// The requested load needs p > 1 on this curve.
class SaturationError : public Error {
 public:
  SaturationError(const std::string& what, double max_load)
      : Error(what), max_load_(max_load) {}

  /// Largest normalized load the curve supports with p <= 1.
  double max_load() const noexcept { return max_load_; }

 private:
  double max_load_;
};

/// The simulated queue ran away past the divergence guard.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace curvyaqm
