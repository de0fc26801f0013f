#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mmc {

enum class ErrorKind {
  // chain-core
  RowNotStochastic,
  InvalidDistribution,
  NotIrreducible,
  Periodic,
  DimensionMismatch,
  SingularSystem,
  EigenFailure,
  NotMixedWithinTMax,
  // simgen / embedding
  EmptyClusterAfterRounding,
  StateSpaceMismatch,
  StateOutOfRange,
  // spectral / likelihood
  NonpositiveLogArgument,
  SvdFailure,
  EmptyInput,
  EmptyCluster,
  ZeroProbabilityTransition,
  // metrics / bounds
  LengthMismatch,
  InvalidRange,
  // io / cli
  InvalidSpec,
  IoFailure,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// True for failures of a numerical routine (as opposed to bad input).
bool is_numerical(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::RowNotStochastic: return "RowNotStochastic";
    case ErrorKind::InvalidDistribution: return "InvalidDistribution";
    case ErrorKind::NotIrreducible: return "NotIrreducible";
    case ErrorKind::Periodic: return "Periodic";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::EigenFailure: return "EigenFailure";
    case ErrorKind::NotMixedWithinTMax: return "NotMixedWithinTMax";
    case ErrorKind::EmptyClusterAfterRounding: return "EmptyClusterAfterRounding";
    case ErrorKind::StateSpaceMismatch: return "StateSpaceMismatch";
    case ErrorKind::StateOutOfRange: return "StateOutOfRange";
    case ErrorKind::NonpositiveLogArgument: return "NonpositiveLogArgument";
    case ErrorKind::SvdFailure: return "SvdFailure";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::EmptyCluster: return "EmptyCluster";
    case ErrorKind::ZeroProbabilityTransition: return "ZeroProbabilityTransition";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::InvalidRange: return "InvalidRange";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

inline bool is_numerical(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::SingularSystem:
    case ErrorKind::EigenFailure:
    case ErrorKind::NotMixedWithinTMax:
    case ErrorKind::SvdFailure:
    case ErrorKind::ZeroProbabilityTransition:
      return true;
    default:
      return false;
  }
}

}  // namespace mmc
