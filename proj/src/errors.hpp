#pragma once

#include <stdexcept>
#include <string>

namespace fadesim {

// Error taxonomy shared by all modules; the C API maps each type to a status code.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fadesim
