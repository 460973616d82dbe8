#pragma once

#include <stdexcept>
#include <string>

namespace mexed {

/// Process exit statuses used by the command-line tool.
enum class ExitStatus : int {
  ok = 0,
  numeric_failure = 1,
  usage = 2,
  degenerate_model = 3,
};

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual ExitStatus exit_status() const noexcept { return ExitStatus::numeric_failure; }
};

/// Argument outside the mathematical domain of an operation (e.g. quantile at q >= 1).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input data or parameters that violate a type invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
  ExitStatus exit_status() const noexcept override { return ExitStatus::usage; }
};

/// Invalid configuration (MCMC, simulation study, CLI flags).
class ConfigError : public Error {
 public:
  using Error::Error;
  ExitStatus exit_status() const noexcept override { return ExitStatus::usage; }
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Iterative procedure (quadrature, series, root finding) failed to reach its tolerance.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// The requested computation is not defined in this parameter regime.
class UnsupportedRegimeError : public Error {
 public:
  using Error::Error;
};

/// Singular prior gradient or singular information matrix.
class DegenerateModelError : public Error {
 public:
  using Error::Error;
  ExitStatus exit_status() const noexcept override { return ExitStatus::degenerate_model; }
};

}  // namespace mexed
