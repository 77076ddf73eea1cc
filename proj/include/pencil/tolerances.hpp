#pragma once

namespace pencil {

/// Numerical margins used across the toolkit.  Zero-valued entries fall
/// back to the size-dependent default at the point of use.
struct Tolerances {
  double rank_rel = 0.0;          // 0 => n * 2^-40
  double snap_rel = 1e-9;         // coefficient snapping, char polys
  double cluster_tol = 1e-6;      // root clustering, relative to 1+|root|
  double imag_tol = 1e-7;         // complex-root rejection
  double separation_tol = 1e-4;   // shift-to-root margin
  double regularity_rel = 1e-10;  // |det| floor relative to matrix scale
  double canon_rel = 1e-8;        // canonization residual per (1+|A|+|B|)
  double eig_tol = 1e-7;          // block eigenvalue bookkeeping
  double cond_limit = 1e8;        // P/Q condition number ceiling
  double spectral_gap_tol = 1e-6; // cluster separation floor
  double sylvester_rel = 1e-9;    // Sylvester residual factor
  double continuity_jump = 0.5;   // per-column jump triggering a warning
};

}  // namespace pencil
