#pragma once

#include <stdexcept>
#include <string>

namespace skewt {

// Numeric-integrity failure: non-normalized density, quadrature breakdown, etc.
// The CLI maps this to exit code 2.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid user input or parameter set. The CLI maps this to exit code 1.
class validation_error : public std::invalid_argument {
 public:
  explicit validation_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Requested operation needs p=1 but was given a higher dimension.
class unsupported_dimension : public validation_error {
 public:
  explicit unsupported_dimension(const std::string& msg) : validation_error(msg) {}
};

}  // namespace skewt
