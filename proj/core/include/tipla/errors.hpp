#ifndef TIPLA_ERRORS_HPP_
#define TIPLA_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <vector>

namespace tipla {

using Vector = std::vector<double>;

// Invalid configuration: bad dimensions, non-positive constants, unknown
// identifiers, stepsize violations under --strict.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid data passed to a checked entry point (non-finite inputs etc).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Filesystem failures while reading inputs or writing artifacts.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tipla

#endif  // TIPLA_ERRORS_HPP_
