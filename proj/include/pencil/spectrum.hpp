#pragma once

// Spectral and structural profile of a pencil on its grid: characteristic
// polynomial, root branches with multiplicities, the (l, d, lhat) split,
// rank profile, shift selection and the rank-degree classification.

#include <optional>
#include <string>
#include <vector>

#include "pencil/pencil.hpp"
#include "pencil/poly.hpp"
#include "pencil/tolerances.hpp"

namespace pencil {

/// Characteristic polynomial det(A(x) + lambda B(x)) in lambda at a fixed
/// point, degree <= n, by interpolation at Chebyshev nodes.  Coefficients
/// below snap_rel * max|coeff| are snapped to exact zero.
RealPoly char_poly_at(const Pencil& p, std::span<const double> x,
                      const Tolerances& tol = {});

struct RootBranch {
  int multiplicity = 0;
  std::vector<double> values;  // per grid point, lexicographic order
};

struct SpectrumProfile {
  int n = 0;
  int l = 0;     // zero-root multiplicity
  int d = 0;     // total multiplicity of the nonzero roots
  int lhat = 0;  // n - d - l
  std::vector<RootBranch> branches;            // ascending at first point
  std::vector<std::vector<double>> s_coeffs;   // per point: S_l .. S_{l+d}
  std::vector<std::string> warnings;           // continuity diagnostics

  int branch_count() const { return static_cast<int>(branches.size()); }
};

/// Roots, multiplicities and the coefficient split at every grid point.
/// Errors: SingularPencil, ComplexRoots, MultiplicityChange, RootCollision,
/// FullRank (a vanishing l or lhat implies det A or det B nonzero).
SpectrumProfile spectrum_profile(const Pencil& p, const Tolerances& tol = {});

struct RankProfile {
  int rank_a = 0;
  int rank_b = 0;
};

/// Constant-rank check for A and B over the grid.
/// Errors: RankChange (with the offending points), FullRank.
RankProfile rank_profile(const Pencil& p, const Tolerances& tol = {});

struct ShiftFunction {
  bool constant = true;
  double value = 0.0;          // when constant
  std::vector<double> values;  // per grid point otherwise

  double at(int flat) const { return constant ? value : values[flat]; }
};

/// Pick c with det(A + cB) != 0 on the grid, c bounded away from 0 and
/// from every root branch.  Constants {1, -1, gap midpoints} are tried
/// first; otherwise a per-point root-gap midpoint is used.  A forced value
/// is validated against the same margins.
ShiftFunction choose_shift(const SpectrumProfile& sp, const Pencil& p,
                           const Tolerances& tol = {},
                           std::optional<double> forced = std::nullopt);

struct RankDegreeClassification {
  bool rank_b_matches_lambda_degree = false;
  bool rank_a_matches_mu_degree = false;
  bool remark2_simple = false;  // criterion holds and all roots are simple
  int lambda_degree = 0;
  int mu_degree = 0;
  int rank_a = 0;
  int rank_b = 0;

  bool criterion() const {
    return rank_b_matches_lambda_degree && rank_a_matches_mu_degree;
  }
};

/// The rank-degree criterion: rank B = deg_lambda det(A + lambda B) and
/// rank A = deg_mu det(mu A + B), checked at every grid point.
RankDegreeClassification rank_degree_classify(const Pencil& p,
                                              const SpectrumProfile& sp,
                                              const Tolerances& tol = {});

}  // namespace pencil
