#pragma once

#include <stdexcept>
#include <string>

namespace mfs {

// Base of every numerical failure raised by the library. `kind()` is the
// short module error name the CLI puts into its failure report.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct EvaluationError : Error {
  explicit EvaluationError(const std::string& what) : Error("evaluation-failure", what) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error("domain-error", what) {}
};

struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, double residual)
      : Error("convergence-error", what), final_residual(residual) {}
  double final_residual;
};

struct ImmersionError : Error {
  explicit ImmersionError(const std::string& what) : Error("immersion-failure", what) {}
};

struct DegeneracyError : Error {
  explicit DegeneracyError(const std::string& what) : Error("degeneracy-error", what) {}
};

}  // namespace mfs
