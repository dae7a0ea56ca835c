#pragma once

#include <stdexcept>

namespace collabrec {

// Invalid configuration: counts, horizons, missing keys.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A numeric parameter outside its mathematical domain.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// The caller broke a model constraint, e.g. re-recommending a consumed item.
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// A user has no unconsumed item left.
struct ExhaustedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedModeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace collabrec
