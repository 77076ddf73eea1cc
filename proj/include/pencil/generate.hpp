#pragma once

// Inverse construction: build a pencil with prescribed canonical structure
// by dressing the canonical blocks with elementary smooth witnesses.  The
// result round-trips through the analyzer and canonizer as a test oracle.

#include <cstdint>
#include <string>
#include <vector>

#include "pencil/canonize.hpp"
#include "pencil/pencil.hpp"

namespace pencil {

struct StructureSpec {
  int n = 0, m = 0;
  int d = 0, l = 0, lhat = 0;
  std::vector<int> mults;                  // p_i, sum = d
  std::vector<std::string> branch_exprs;   // one per J block, exprlang
  Mat m_pattern, n_pattern;                // strictly upper masks (l, lhat)
  std::uint64_t seed = 0;

  /// Error(SpecViolation) on inconsistent sizes or patterns.
  void validate() const;
};

struct GeneratedInstance {
  Pencil pencil;             // A = P0^-1 Ac Q0^-1, B = P0^-1 Bc Q0^-1
  MatrixFunction canon_a;    // Ac = diag{E_d, M, E_lhat}
  MatrixFunction canon_b;    // Bc = diag{J(x), E_l, N}
  MatrixFunction p0, q0;     // ground-truth witnesses
  StructureSpec spec;
};

/// Errors: SpecViolation; BranchSeparation when the branch expressions
/// collide, vanish, or leave the real line on the grid.
GeneratedInstance generate(const StructureSpec& spec, const Box& domain,
                           const std::vector<int>& grid_counts);

/// Convenience: default superdiagonal nilpotent pattern of the given order
/// (zero matrix for order <= 1).
Mat superdiagonal_pattern(int order);

}  // namespace pencil
