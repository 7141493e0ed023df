#pragma once

#include <stdexcept>
#include <string>

namespace risfbl {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Result not representable as a finite double.
class OverflowError : public std::overflow_error {
public:
  using std::overflow_error::overflow_error;
};

/// An iterative method (quadrature, series, continued fraction) hit its cap
/// before reaching the requested tolerance.
class NonConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Moment pair with non-positive variance; no Gamma law can match it.
class DegenerateDistributionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad scenario / configuration input. Carries the offending line (0 if none)
/// and field name so the CLI can point at it.
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string &what, int line = 0, std::string field = {})
      : std::runtime_error(what), line_(line), field_(std::move(field)) {}
  int line() const noexcept { return line_; }
  const std::string &field() const noexcept { return field_; }

private:
  int line_;
  std::string field_;
};

} // namespace risfbl
