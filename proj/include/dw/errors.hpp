#pragma once

#include <stdexcept>
#include <string>

namespace dw {

/// Malformed or inconsistent input: bad config, invalid grid, wrong representation.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Propagation produced NaN/Inf or an algebraic identity failed beyond tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read, written or decoded.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dw
