#pragma once

// Dense kernels for small matrices: factorizations, rank, Gram-Schmidt,
// Sylvester solves, nilpotency tests, characteristic polynomials.

#include <complex>
#include <optional>
#include <vector>

#include "pencil/mat.hpp"
#include "pencil/poly.hpp"

namespace pencil {

/// Relative rank threshold when the caller passes none: n * 2^-40.
double default_rank_tol(int n);

/// Determinant by partially pivoted elimination.  A pivot below the rank
/// tolerance (relative to the largest column norm) yields exactly 0.
double det(const Mat& m);

/// Gauss-Jordan inverse; Error(SingularMatrix) when a pivot underflows.
Mat inverse(const Mat& m);

/// Solve a x = b (multiple right-hand sides), partial pivoting.
Mat solve(const Mat& a, const Mat& b);
Vec solve(const Mat& a, const Vec& b);

/// Number of column-pivoted orthogonalization steps with pivot norm
/// above rel_tol * (largest pivot norm).  rel_tol <= 0 uses the default.
int rank(const Mat& m, double rel_tol = 0.0);

/// Same orthogonalization, but pivots are measured against an absolute
/// floor.  Used on pipeline blocks whose meaningful scale is set by the
/// surrounding field rather than the block itself.
int rank_absolute(const Mat& m, double abs_floor);

/// Complete-pivot elimination L m R = diag{E_r, 0}.  Only the right
/// transform R and the rank are needed by callers; R's last n-r columns
/// span the kernel, in particular m * (R e_n) = 0 when r < n.
struct RankNormalForm {
  Mat right;
  int rank = 0;
};
RankNormalForm rank_normal_form(const Mat& m, double rel_tol = 0.0);

/// Orthonormalize the given columns in order (two-pass modified
/// Gram-Schmidt).  First output column is parallel to the first input;
/// span of the first k outputs equals span of the first k inputs.
/// Error(DependentColumns) when a residual underflows.
Mat gram_schmidt(const std::vector<Vec>& columns, double rel_tol = 1e-10);

/// Solve F X - X G = C via the Kronecker system.  Requires the spectra of
/// F and G separated by more than gap_tol (Error(SpectraOverlap)).
Mat sylvester_solve(const Mat& f, const Mat& g, const Mat& c,
                    double gap_tol = 1e-6);

/// Smallest k <= n with ||M^k|| <= tol * ||M||^k (induced infinity norm);
/// the zero matrix has index 1.  nullopt when no k <= n qualifies.
std::optional<int> nilpotency_index(const Mat& m, double tol = 1e-10);

/// Monic characteristic polynomial det(xE - M), by interpolation at n+1
/// Chebyshev nodes scaled past the norm of M.
RealPoly char_poly(const Mat& m);

/// Eigenvalues as the roots of the characteristic polynomial.
std::vector<std::complex<double>> eigenvalues(const Mat& m);

/// Orthonormal basis of the range of F, dimension q, by column-pivoted
/// Gram-Schmidt.  Error(ClusterMismatch) if the numerical rank of F at
/// rank_tol differs from q.
Mat orthonormal_range_basis(const Mat& f, int q, double rank_tol = 1e-8);

/// Orthogonal Procrustes factor W minimizing ||V W - V_prev||_F, by the
/// Newton polar iteration on V^T V_prev.  nullopt when the subspaces are
/// too far apart for the polar factor to exist numerically.
std::optional<Mat> procrustes_align(const Mat& v, const Mat& v_prev);

/// Inverse of an (upper) unit triangular matrix by back substitution;
/// keeps the triangular zero pattern exact.
Mat unit_upper_inverse(const Mat& u);

double cond_inf(const Mat& m);

}  // namespace pencil
