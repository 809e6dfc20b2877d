#pragma once

#include <stdexcept>
#include <string>

namespace wgqed {

/// Emitter positions that cannot form a chain (empty, unsorted, coincident).
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Collective matrix too close to singular for the requested detuning.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double delta_omega, double rcond)
      : std::runtime_error(what), delta_omega_(delta_omega), rcond_(rcond) {}

  double delta_omega() const { return delta_omega_; }
  double rcond() const { return rcond_; }

 private:
  double delta_omega_;
  double rcond_;
};

/// Time stepping failed: step/delay mismatch, non-finite state, mode grid too coarse.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wgqed
