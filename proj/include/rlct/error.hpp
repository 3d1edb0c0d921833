#pragma once

#include <stdexcept>
#include <string>

namespace rlct {

enum class ErrorKind {
  InvalidSpace,
  IncompleteMoments,
  DegreeOverflow,
  SpaceMismatch,
  VarMismatch,
  NotNilpotent,
  NotAUnit,
  UnsafeSubstitution,
  OutOfTruncation,
  DegenerateTruePoint,
  SingularJacobian,
  InvalidModel,
  Precondition,
  NormalCrossingFailure,
  OutOfDomain,
  InsufficientSamples,
  NoClosedForm,
  ModelFile,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidSpace: return "InvalidSpace";
    case ErrorKind::IncompleteMoments: return "IncompleteMoments";
    case ErrorKind::DegreeOverflow: return "DegreeOverflow";
    case ErrorKind::SpaceMismatch: return "SpaceMismatch";
    case ErrorKind::VarMismatch: return "VarMismatch";
    case ErrorKind::NotNilpotent: return "NotNilpotent";
    case ErrorKind::NotAUnit: return "NotAUnit";
    case ErrorKind::UnsafeSubstitution: return "UnsafeSubstitution";
    case ErrorKind::OutOfTruncation: return "OutOfTruncation";
    case ErrorKind::DegenerateTruePoint: return "DegenerateTruePoint";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::Precondition: return "Precondition";
    case ErrorKind::NormalCrossingFailure: return "NormalCrossingFailure";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::NoClosedForm: return "NoClosedForm";
    case ErrorKind::ModelFile: return "ModelFile";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rlct
