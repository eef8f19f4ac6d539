#pragma once

#include <stdexcept>
#include <string>

namespace conekit {

enum class ErrorKind {
  UnsupportedDimension,
  DimensionMismatch,
  InsufficientData,
  Validation,
  ExceptionalRate,
  QuadratureNonconvergence,
  DifferentiationAccuracy,
  SingularMetric,
  NonPositiveForm,
  StepSize,
  NotClosed,
  NoLimit,
  TailDivergence,
  RankAmbiguity,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace conekit
