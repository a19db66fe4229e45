#pragma once

#include <stdexcept>
#include <string>

namespace mems {

/// Input outside the documented validity window of a formula or operation.
/// Carries the reason so callers can distinguish "wrong parameters" from
/// "numerical failure".
class DomainError : public std::domain_error {
  public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A field evaluation touched the singular set u >= 1.  The offending node
/// is recorded; evaluations are rejected rather than clamped.
class SingularStateError : public std::runtime_error {
  public:
    SingularStateError(const std::string& what, int node)
        : std::runtime_error(what), node_(node) {}
    int node() const { return node_; }

  private:
    int node_;
};

/// Iterative solve did not reach its tolerance.  Keeps the last residual
/// norm so callers (and logs) can tell a near-miss from a blow-up.
class ConvergenceError : public std::runtime_error {
  public:
    ConvergenceError(const std::string& what, double last_residual, int iterations)
        : std::runtime_error(what), last_residual_(last_residual), iterations_(iterations) {}
    double last_residual() const { return last_residual_; }
    int iterations() const { return iterations_; }

  private:
    double last_residual_;
    int iterations_;
};

/// Malformed configuration (bad key, bad value, out-of-range field).
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace mems
