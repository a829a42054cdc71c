#pragma once

#include <stdexcept>
#include <string>

namespace entrocurve {

enum class ErrorKind {
  // input validation
  BadParameter,
  InvalidGenerator,
  NotReversible,
  DisconnectedGraph,
  EmptyBox,
  IndexOutOfRange,
  InfeasibleMarginals,
  NegativeInput,
  DomainError,
  WrongModel,
  WitnessOutsideSupport,
  TooManyGeodesics,
  PremiseViolated,
  ParseError,
  // numerical failures
  NoConvergence,
  NotConverged,
  ScheduleTooCoarse,
  NumericalUnderflow,
  EigenFailure,
};

const char* error_kind_name(ErrorKind kind);

// True for the kinds that signal a numerical/convergence failure rather
// than invalid input; the CLI maps these to a distinct exit code.
bool is_convergence_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BadParameter: return "BadParameter";
    case ErrorKind::InvalidGenerator: return "InvalidGenerator";
    case ErrorKind::NotReversible: return "NotReversible";
    case ErrorKind::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorKind::EmptyBox: return "EmptyBox";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::InfeasibleMarginals: return "InfeasibleMarginals";
    case ErrorKind::NegativeInput: return "NegativeInput";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::WrongModel: return "WrongModel";
    case ErrorKind::WitnessOutsideSupport: return "WitnessOutsideSupport";
    case ErrorKind::TooManyGeodesics: return "TooManyGeodesics";
    case ErrorKind::PremiseViolated: return "PremiseViolated";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::ScheduleTooCoarse: return "ScheduleTooCoarse";
    case ErrorKind::NumericalUnderflow: return "NumericalUnderflow";
    case ErrorKind::EigenFailure: return "EigenFailure";
  }
  return "Error";
}

inline bool is_convergence_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NoConvergence:
    case ErrorKind::NotConverged:
    case ErrorKind::ScheduleTooCoarse:
    case ErrorKind::NumericalUnderflow:
    case ErrorKind::EigenFailure:
      return true;
    default:
      return false;
  }
}

}  // namespace entrocurve
