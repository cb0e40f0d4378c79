#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lbs {

enum class ErrorKind {
  NonConvergence,
  OutsideStrip,
  DegenerateHessian,
  UnsupportedCombination,
  UnsupportedSurface,
  ProjectionFailure,
  ContinuityViolation,
  DegenerateCell,
  OracleInsufficient,
  NoConvergence,
  IndefiniteMass,
  ClusterNotSeparated,
  ExtrapolationUnstable,
  InsufficientData,
  NonPositiveError,
  InvalidArgument,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

/// Every recoverable failure in the library is reported through this type;
/// `kind()` is what the study runner records as the row reason code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::OutsideStrip: return "OutsideStrip";
    case ErrorKind::DegenerateHessian: return "DegenerateHessian";
    case ErrorKind::UnsupportedCombination: return "UnsupportedCombination";
    case ErrorKind::UnsupportedSurface: return "UnsupportedSurface";
    case ErrorKind::ProjectionFailure: return "ProjectionFailure";
    case ErrorKind::ContinuityViolation: return "ContinuityViolation";
    case ErrorKind::DegenerateCell: return "DegenerateCell";
    case ErrorKind::OracleInsufficient: return "OracleInsufficient";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::IndefiniteMass: return "IndefiniteMass";
    case ErrorKind::ClusterNotSeparated: return "ClusterNotSeparated";
    case ErrorKind::ExtrapolationUnstable: return "ExtrapolationUnstable";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::NonPositiveError: return "NonPositiveError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace lbs
