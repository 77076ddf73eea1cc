#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pencil {

enum class ErrorKind {
  // input / expression layer
  SyntaxError,
  UnknownFunction,
  VariableOutOfRange,
  EvalFault,
  InputError,
  DimensionMismatch,
  SpecViolation,
  // dense kernels
  NonSquare,
  SingularMatrix,
  DependentColumns,
  SpectraOverlap,
  ComplexRoots,
  // pencil hypotheses
  SingularPencil,
  MultiplicityChange,
  RootCollision,
  RankChange,
  FullRank,
  NoShiftFound,
  BranchSeparation,
  // canonization
  NonzeroEigenvalue,
  ClusterMismatch,
  GapTooSmall,
  ConditioningBlowup,
};

const char* error_kind_name(ErrorKind kind);

/// Exception carrying an error kind plus, when known, the offending grid
/// point indices (flat, lexicographic order).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}
  Error(ErrorKind kind, std::string message, std::vector<int> points)
      : std::runtime_error(std::move(message)),
        kind_(kind),
        points_(std::move(points)) {}

  ErrorKind kind() const { return kind_; }
  const char* kind_name() const { return error_kind_name(kind_); }
  const std::vector<int>& points() const { return points_; }

 private:
  ErrorKind kind_;
  std::vector<int> points_;
};

}  // namespace pencil
