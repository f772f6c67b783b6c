#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace isofocus {

/// Failure categories raised by the construction, evaluation and
/// verification layers. The CLI maps these onto process exit codes.
enum class ErrorKind {
  InvalidParams,
  SonicSingularity,
  OriginIndeterminate,
  CriticalPoint,
  DomainError,
  NodeNotReached,
  AssumptionViolated,
  NoSonicCrossing,
  NoBracket,
  EntropyViolation,
  SignViolation,
  TailDivergence,
  WeakJump,
  OriginAtCollapse,
  QuadratureFailure,
  ClassViolation,
  PositivityLoss,
  CFLViolation,
  IntegrationFailure,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace isofocus
