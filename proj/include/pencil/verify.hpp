#pragma once

// Numerical certification of claimed equivalences and similarity
// reductions.  Residuals are checked pointwise on the grid; smoothness is
// only diagnosed (adjacent-point jumps), never asserted as proof.

#include <optional>
#include <string>
#include <vector>

#include "pencil/canonize.hpp"
#include "pencil/pencil.hpp"
#include "pencil/tolerances.hpp"

namespace pencil {

struct ContinuityDiagnostics {
  double max_jump = 0.0;     // largest adjacent-point entry jump
  double median_jump = 0.0;  // finite-difference scale
  double ratio = 0.0;        // max / median, large values suggest a jump
  bool flagged = false;      // diagnostic only, never part of pass/fail
};

struct VerificationReport {
  bool pass = false;
  double tolerance = 0.0;    // residual threshold actually applied
  double max_residual_a = 0.0;
  double max_residual_b = 0.0;
  std::vector<double> residual_a, residual_b;  // per grid point
  double min_abs_det_p = 0.0, min_abs_det_q = 0.0;
  double det_floor = 0.0;
  std::optional<int> nilp_index_m, nilp_index_n;
  ContinuityDiagnostics continuity_p, continuity_q;
  std::vector<std::string> notes;
};

/// Check P(x) A(x) Q(x) = targetA(x), P(x) B(x) Q(x) = targetB(x) at every
/// grid point (sufficient for all lambda by linearity), P and Q
/// nonsingular.  All fields sampled per point.
VerificationReport verify_equivalence(const Pencil& pencil,
                                      const std::vector<Mat>& p,
                                      const std::vector<Mat>& q,
                                      const std::vector<Mat>& target_a,
                                      const std::vector<Mat>& target_b,
                                      const Grid& grid,
                                      const Tolerances& tol = {});

/// Closed-form transforms and target pencil.
VerificationReport verify_equivalence(const Pencil& pencil,
                                      const MatrixFunction& p,
                                      const MatrixFunction& q,
                                      const MatrixFunction& target_a,
                                      const MatrixFunction& target_b,
                                      const Tolerances& tol = {});

/// A canonize result against its own pencil.
VerificationReport verify_equivalence(const Pencil& pencil,
                                      const EquivalencePair& pair,
                                      const CanonicalForm& form,
                                      const Tolerances& tol = {});

struct SimilarityReport {
  bool pass = false;
  double unitary_residual = 0.0;   // max ||U^T U - E||
  double similarity_residual = 0.0;  // max ||U^-1 A U - N||
  double lower_residual = 0.0;     // strict-upper-triangularity defect of N
  std::optional<int> nilpotency;   // largest index found, nullopt if none
  std::vector<std::string> notes;
};

/// Check U unitary, U^-1 A U = N, N strictly upper triangular, and report
/// the nilpotency index.  Inputs are parallel sample lists (any points).
SimilarityReport verify_similarity(const std::vector<Mat>& a,
                                   const std::vector<Mat>& u,
                                   const std::vector<Mat>& n,
                                   const Tolerances& tol = {});

}  // namespace pencil
