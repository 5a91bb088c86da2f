#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace fsq {

// Every library failure carries the module and operation that raised it so the
// CLI can emit a structured error record.
class Error : public std::runtime_error {
 public:
  Error(std::string module, std::string operation, const std::string& what,
        std::optional<double> z_m = std::nullopt)
      : std::runtime_error(what),
        module_(std::move(module)),
        operation_(std::move(operation)),
        z_m_(z_m) {}

  const std::string& module() const { return module_; }
  const std::string& operation() const { return operation_; }
  std::optional<double> z_position() const { return z_m_; }
  virtual const char* kind() const { return "error"; }

 private:
  std::string module_;
  std::string operation_;
  std::optional<double> z_m_;
};

class ConfigurationError : public Error {
 public:
  using Error::Error;
  const char* kind() const override { return "configuration"; }
};

class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const override { return "domain"; }
};

class NumericalError : public Error {
 public:
  using Error::Error;
  const char* kind() const override { return "numerical"; }
};

class AliasingError : public Error {
 public:
  AliasingError(std::string operation, const std::string& what, double z_m,
                int suggested_points)
      : Error("classical_propagator", std::move(operation), what, z_m),
        suggested_points_(suggested_points) {}
  int suggested_points() const { return suggested_points_; }
  const char* kind() const override { return "aliasing"; }

 private:
  int suggested_points_;
};

class ContractViolation : public Error {
 public:
  using Error::Error;
  const char* kind() const override { return "contract"; }
};

}  // namespace fsq
