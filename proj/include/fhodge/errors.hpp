#pragma once

#include <stdexcept>
#include <string>

namespace fhodge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed scenario configs, bad flags, out-of-range parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Mesh-level defects: inconsistent orientation, degenerate simplices, non-manifold edges.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// A computation needs an analytic field the grid does not carry.
class MissingFieldError : public Error {
 public:
  using Error::Error;
};

}  // namespace fhodge
