#include "pencil/verify.hpp"

#include <algorithm>
#include <cmath>

#include "pencil/errors.hpp"

namespace pencil {

namespace {

ContinuityDiagnostics continuity_of(const std::vector<Mat>& field,
                                    const Grid& grid) {
  ContinuityDiagnostics cd;
  std::vector<double> jumps;
  for (int flat = 0; flat < grid.total(); ++flat) {
    int prev = grid.predecessor(flat);
    if (prev < 0) continue;
    jumps.push_back((field[flat] - field[prev]).max_abs());
  }
  if (jumps.empty()) return cd;
  cd.max_jump = *std::max_element(jumps.begin(), jumps.end());
  std::vector<double> sorted = jumps;
  std::sort(sorted.begin(), sorted.end());
  cd.median_jump = sorted[sorted.size() / 2];
  double floor_ = 1e-14;
  cd.ratio = cd.max_jump / std::max(cd.median_jump, floor_);
  cd.flagged = cd.ratio > 50 && cd.max_jump > 1e-8;
  return cd;
}

}  // namespace

VerificationReport verify_equivalence(const Pencil& pencil,
                                      const std::vector<Mat>& p,
                                      const std::vector<Mat>& q,
                                      const std::vector<Mat>& target_a,
                                      const std::vector<Mat>& target_b,
                                      const Grid& grid,
                                      const Tolerances& tol) {
  const int total = grid.total();
  if (static_cast<int>(p.size()) != total ||
      static_cast<int>(q.size()) != total ||
      static_cast<int>(target_a.size()) != total ||
      static_cast<int>(target_b.size()) != total)
    throw Error(ErrorKind::DimensionMismatch,
                "verify_equivalence: sample counts do not match the grid");
  const int n = pencil.order();

  VerificationReport rep;
  rep.residual_a.resize(total);
  rep.residual_b.resize(total);
  rep.min_abs_det_p = rep.min_abs_det_q =
      std::numeric_limits<double>::infinity();

  double scale = 0;
  bool ok = true;
  for (int flat = 0; flat < total; ++flat) {
    Point x = grid.point(flat);
    Mat a = pencil.a.eval(x), b = pencil.b.eval(x);
    if (p[flat].rows() != n || p[flat].cols() != n || q[flat].rows() != n ||
        q[flat].cols() != n)
      throw Error(ErrorKind::DimensionMismatch,
                  "verify_equivalence: transform order differs from pencil");
    scale = std::max(scale, 1 + a.norm_inf() + b.norm_inf());
    rep.residual_a[flat] = (p[flat] * a * q[flat] - target_a[flat]).max_abs();
    rep.residual_b[flat] = (p[flat] * b * q[flat] - target_b[flat]).max_abs();
    rep.max_residual_a = std::max(rep.max_residual_a, rep.residual_a[flat]);
    rep.max_residual_b = std::max(rep.max_residual_b, rep.residual_b[flat]);
    rep.min_abs_det_p = std::min(rep.min_abs_det_p, std::abs(det(p[flat])));
    rep.min_abs_det_q = std::min(rep.min_abs_det_q, std::abs(det(q[flat])));
  }
  rep.tolerance = tol.canon_rel * scale;
  rep.det_floor = tol.regularity_rel * scale;
  ok = rep.max_residual_a <= rep.tolerance &&
       rep.max_residual_b <= rep.tolerance &&
       rep.min_abs_det_p > rep.det_floor && rep.min_abs_det_q > rep.det_floor;

  rep.continuity_p = continuity_of(p, grid);
  rep.continuity_q = continuity_of(q, grid);
  if (rep.continuity_p.flagged)
    rep.notes.push_back(
        "diagnostic: P jumps between adjacent grid points exceed the local"
        " finite-difference scale (not part of pass/fail)");
  if (rep.continuity_q.flagged)
    rep.notes.push_back(
        "diagnostic: Q jumps between adjacent grid points exceed the local"
        " finite-difference scale (not part of pass/fail)");
  rep.notes.push_back(
      "continuity figures are diagnostics; smoothness is not certified");
  rep.pass = ok;
  return rep;
}

VerificationReport verify_equivalence(const Pencil& pencil,
                                      const MatrixFunction& p,
                                      const MatrixFunction& q,
                                      const MatrixFunction& target_a,
                                      const MatrixFunction& target_b,
                                      const Tolerances& tol) {
  Grid g = pencil.grid();
  return verify_equivalence(pencil, sample(p, g), sample(q, g),
                            sample(target_a, g), sample(target_b, g), g, tol);
}

VerificationReport verify_equivalence(const Pencil& pencil,
                                      const EquivalencePair& pair,
                                      const CanonicalForm& form,
                                      const Tolerances& tol) {
  Grid g = pencil.grid();
  std::vector<Mat> ta, tb;
  ta.reserve(g.total());
  tb.reserve(g.total());
  for (int flat = 0; flat < g.total(); ++flat) {
    ta.push_back(form.left_at(flat));
    tb.push_back(form.right_at(flat));
  }
  VerificationReport rep =
      verify_equivalence(pencil, pair.p, pair.q, ta, tb, g, tol);
  // nilpotency bookkeeping for the canonical blocks
  int im = 0, in_ = 0;
  bool mn = true, nn = true;
  for (int flat = 0; flat < g.total(); ++flat) {
    auto i1 = nilpotency_index(form.m_block[flat], 1e-10);
    auto i2 = nilpotency_index(form.n_block[flat], 1e-10);
    mn = mn && i1.has_value();
    nn = nn && i2.has_value();
    im = std::max(im, i1.value_or(0));
    in_ = std::max(in_, i2.value_or(0));
  }
  if (mn) rep.nilp_index_m = im;
  if (nn) rep.nilp_index_n = in_;
  rep.pass = rep.pass && mn && nn && im <= form.l && in_ <= form.lhat;
  return rep;
}

SimilarityReport verify_similarity(const std::vector<Mat>& a,
                                   const std::vector<Mat>& u,
                                   const std::vector<Mat>& n,
                                   const Tolerances& tol) {
  if (a.size() != u.size() || a.size() != n.size() || a.empty())
    throw Error(ErrorKind::DimensionMismatch,
                "verify_similarity: sample lists differ in length");
  SimilarityReport rep;
  int order = a[0].rows();
  int max_index = 0;
  bool nilpotent_everywhere = true;
  double scale = 1;
  for (size_t s = 0; s < a.size(); ++s) {
    if (!a[s].square() || a[s].rows() != order || u[s].rows() != order ||
        u[s].cols() != order || n[s].rows() != order || n[s].cols() != order)
      throw Error(ErrorKind::DimensionMismatch,
                  "verify_similarity: matrix orders disagree");
    scale = std::max(scale, a[s].norm_inf());
    Mat ut_u = u[s].transpose() * u[s] - Mat::identity(order);
    rep.unitary_residual = std::max(rep.unitary_residual, ut_u.max_abs());
    Mat sim = u[s].transpose() * a[s] * u[s] - n[s];
    rep.similarity_residual = std::max(rep.similarity_residual, sim.max_abs());
    for (int i = 0; i < order; ++i)
      for (int j = 0; j <= i; ++j)
        rep.lower_residual = std::max(rep.lower_residual, std::abs(n[s](i, j)));
    auto idx = nilpotency_index(n[s], 1e-10);
    nilpotent_everywhere = nilpotent_everywhere && idx.has_value();
    max_index = std::max(max_index, idx.value_or(0));
  }
  if (nilpotent_everywhere) rep.nilpotency = max_index;
  rep.pass = rep.unitary_residual <= 1e-10 &&
             rep.similarity_residual <= tol.canon_rel * (1 + scale) &&
             rep.lower_residual <= tol.canon_rel * (1 + scale) &&
             nilpotent_everywhere;
  if (!nilpotent_everywhere)
    rep.notes.push_back("N is not nilpotent at some sample");
  return rep;
}

}  // namespace pencil
