#pragma once

#include <stdexcept>
#include <string>

namespace cabo {

/// Bad experiment/policy configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or malformed input data (CLI exit code 2).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure that survived recovery attempts (CLI exit code 3).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A reveal attempt beyond the session budget.
class BudgetError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Session used out of order: reveal after commit, double commit.
class SessionStateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace cabo
