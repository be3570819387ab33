#pragma once

#include <stdexcept>
#include <string>

namespace bcl {

/// Invalid argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Requested problem size exceeds what a brute-force routine supports.
class CapabilityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A numerical solver gave up. Carries the best residual it reached.
class SolverError : public std::runtime_error {
  public:
    SolverError(const std::string &what, double best_residual)
        : std::runtime_error(what), best_residual_(best_residual) {}

    double best_residual() const noexcept { return best_residual_; }

  private:
    double best_residual_;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace bcl
