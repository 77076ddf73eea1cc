#pragma once

// The constructive reduction of a profiled pencil to the canonical form
//   diag{E_d, M(x), E_lhat} + lambda diag{J(x), E_l, N(x)}
// with the transformations P(x), Q(x), sampled per grid point.

#include <string>
#include <vector>

#include "pencil/linalg.hpp"
#include "pencil/pencil.hpp"
#include "pencil/spectrum.hpp"
#include "pencil/tolerances.hpp"

namespace pencil {

struct CanonicalForm {
  int n = 0, d = 0, l = 0, lhat = 0;
  std::vector<int> mults;                    // p_i, one per J block
  std::vector<std::vector<Mat>> j_blocks;    // [branch][grid point]
  std::vector<Mat> m_block;                  // [grid point], l x l nilpotent
  std::vector<Mat> n_block;                  // [grid point], lhat x lhat

  Mat left_at(int flat) const;   // diag{E_d, M, E_lhat}
  Mat right_at(int flat) const;  // diag{J_1..J_k, E_l, N}
};

struct EquivalencePair {
  std::vector<Mat> p, q;            // per grid point
  std::vector<double> cond_p, cond_q;
  std::vector<double> det_p, det_q;
  std::vector<double> residual_a, residual_b;
};

struct NilpotentReduction {
  std::vector<Mat> u;  // unitary per point
  std::vector<Mat> n;  // strictly upper triangular per point
  int rank = 0;
  int max_index = 0;   // largest nilpotency index over the grid
  std::vector<std::string> warnings;
};

/// Unitary reduction of a zero-spectrum, constant-rank matrix field to
/// strictly upper triangular form (kernel vector from the rank normal
/// form, Gram-Schmidt completion, deflate, recurse).  Column signs are
/// aligned to the grid predecessor.  Errors: NonzeroEigenvalue, RankChange.
NilpotentReduction nilpotent_reduce(const std::vector<Mat>& samples,
                                    const Grid& grid,
                                    const Tolerances& tol = {});

struct SpectralCluster {
  double value = 0.0;  // predicted eigenvalue
  int size = 0;        // predicted multiplicity
};

struct SpectralSplitResult {
  std::vector<Mat> t;                       // per point
  std::vector<std::vector<Mat>> blocks;     // [point][cluster]
  std::vector<double> off_residual;         // per point
  std::vector<std::string> warnings;
};

/// Block-diagonalize each G(x) along its predicted eigenvalue clusters:
/// invariant-subspace bases by annihilating-product deflation, then
/// Sylvester sweeps until the off-block residual is at rounding level.
/// T is continuity-aligned between neighboring grid points.
/// Errors: GapTooSmall, ClusterMismatch.
SpectralSplitResult spectral_split(
    const std::vector<Mat>& g,
    const std::vector<std::vector<SpectralCluster>>& clusters,
    const Grid& grid, const Tolerances& tol = {});

struct CanonizeResult {
  CanonicalForm form;
  EquivalencePair pair;
  std::vector<std::string> warnings;
};

/// Full reduction chain: shift, spectral split of (A+cB)^-1 B, nilpotent
/// reductions of the N and M parts, block inversions, assembly of P and Q.
/// Errors propagate with the pipeline stage tagged; ConditioningBlowup when
/// cond P or cond Q exceeds the limit.
CanonizeResult canonize(const Pencil& p, const SpectrumProfile& sp,
                        const ShiftFunction& shift,
                        const Tolerances& tol = {});

}  // namespace pencil
