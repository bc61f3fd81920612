#pragma once

#include <stdexcept>
#include <string>

namespace flowregime {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid configuration or hyperparameter values, detected before any computation.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Malformed input data (always carries enough context to locate the offending record).
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

// Numerical degeneracy at runtime (underflow of all hypotheses, non-finite intermediates).
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& msg) : Error(msg) {}
};

}  // namespace flowregime
