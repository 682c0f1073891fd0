#pragma once

#include <stdexcept>
#include <string>

namespace mmot {

// Base class for all toolkit errors.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed run configuration (CLI exit code 2).
class config_error : public error {
 public:
  using error::error;
};

// Instance exceeds the configured variable/memory cap (CLI exit code 3).
class cap_error : public error {
 public:
  using error::error;
};

// Iterative solver failed to converge (CLI exit code 4).
class convergence_error : public error {
 public:
  using error::error;
};

}  // namespace mmot
