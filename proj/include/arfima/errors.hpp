#pragma once

#include <stdexcept>
#include <string>

namespace arfima {

/// Bad argument shape or value (sizes, orders, hyperparameters).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameter outside the stationary/invertible region or a singular point.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A recursion or sampler failed numerically (non-PD, rejection cap, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Kernel requested for a configuration it does not support.
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Invalid run configuration (CLI / JSON config, proposal covariance).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data unusable (empty, non-finite, constant where forbidden).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace arfima
