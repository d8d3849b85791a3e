#pragma once

#include <stdexcept>
#include <string>

namespace resonance {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class NoResonanceError : public Error { using Error::Error; };
class OutOfWellError : public Error { using Error::Error; };
class SingularSystemError : public Error { using Error::Error; };
class SolvabilityError : public Error { using Error::Error; };
class UnsupportedOrderError : public Error { using Error::Error; };
class TruncationError : public Error { using Error::Error; };
class AssumptionViolated : public Error { using Error::Error; };
class NumericalFailure : public Error { using Error::Error; };

}  // namespace resonance
