#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace edctr {

/// Error classes surfaced by the library. The CLI maps each one to its own
/// process exit code.
enum class ErrorCategory {
  InvalidGeometry,
  OutOfField,
  UnderPopulation,
  DeadCluster,
  SingularFormula,
  Config,
  Io,
  MissingCell,
  SimulationComplete,
};

std::string_view to_string(ErrorCategory category) noexcept;

/// Process exit code for an error category (always nonzero).
int exit_code(ErrorCategory category) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Raised for a bad configuration value. `field()` names the offending key
/// using a dotted path, e.g. "radio.e_elec".
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(ErrorCategory::Config, field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace edctr
