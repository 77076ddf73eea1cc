#include "pencil/errors.hpp"

namespace pencil {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownFunction: return "UnknownFunction";
    case ErrorKind::VariableOutOfRange: return "VariableOutOfRange";
    case ErrorKind::EvalFault: return "EvalFault";
    case ErrorKind::InputError: return "InputError";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SpecViolation: return "SpecViolation";
    case ErrorKind::NonSquare: return "NonSquare";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::DependentColumns: return "DependentColumns";
    case ErrorKind::SpectraOverlap: return "SpectraOverlap";
    case ErrorKind::ComplexRoots: return "ComplexRoots";
    case ErrorKind::SingularPencil: return "SingularPencil";
    case ErrorKind::MultiplicityChange: return "MultiplicityChange";
    case ErrorKind::RootCollision: return "RootCollision";
    case ErrorKind::RankChange: return "RankChange";
    case ErrorKind::FullRank: return "FullRank";
    case ErrorKind::NoShiftFound: return "NoShiftFound";
    case ErrorKind::BranchSeparation: return "BranchSeparation";
    case ErrorKind::NonzeroEigenvalue: return "NonzeroEigenvalue";
    case ErrorKind::ClusterMismatch: return "ClusterMismatch";
    case ErrorKind::GapTooSmall: return "GapTooSmall";
    case ErrorKind::ConditioningBlowup: return "ConditioningBlowup";
  }
  return "UnknownError";
}

}  // namespace pencil
