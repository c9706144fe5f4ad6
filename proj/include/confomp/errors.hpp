#pragma once

#include <stdexcept>
#include <string>

namespace confomp {

/// Precondition violated by a caller-supplied argument.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The selected column submatrix is numerically rank deficient, i.e. the
/// instance violates spark(A) > |Lambda| for the columns in play.
class RankDeficient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace confomp
