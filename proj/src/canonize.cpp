#include "pencil/canonize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pencil/errors.hpp"

namespace pencil {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

Mat CanonicalForm::left_at(int flat) const {
  std::vector<Mat> blocks;
  if (d > 0) blocks.push_back(Mat::identity(d));
  blocks.push_back(m_block[flat]);
  if (lhat > 0) blocks.push_back(Mat::identity(lhat));
  return block_diag(blocks);
}

Mat CanonicalForm::right_at(int flat) const {
  std::vector<Mat> blocks;
  for (const auto& jb : j_blocks) blocks.push_back(jb[flat]);
  blocks.push_back(Mat::identity(l));
  blocks.push_back(n_block[flat]);
  return block_diag(blocks);
}

namespace {

// Zero-spectrum test through the characteristic polynomial of the scaled
// matrix.  The induced norm bounds the spectral radius, so a matrix below
// eig_tol passes outright.  Otherwise the scaled coefficients must be
// consistent with eigenvalue moduli <= eig_tol; genuinely nilpotent input
// leaves only rounding noise, which the floor admits (a true eigenvalue of
// modulus eps_k produces a coefficient ~eps_k^(n-i), not certifiable below
// rounding).
void require_zero_spectrum(const Mat& m, double eig_tol, int flat) {
  const int n = m.rows();
  double s = m.norm_inf();
  if (s <= eig_tol || n == 0) return;
  RealPoly cp = char_poly((1.0 / s) * m);
  double ratio = eig_tol / s;
  for (int i = 0; i < n; ++i) {
    double limit = std::max(std::pow(ratio, n - i), 1e-12);
    if (std::abs(cp[i]) > limit)
      throw Error(ErrorKind::NonzeroEigenvalue,
                  "matrix has spectrum away from zero (coefficient " +
                      std::to_string(i) + " = " + std::to_string(cp[i]) +
                      " of the scaled characteristic polynomial)",
                  flat >= 0 ? std::vector<int>{flat} : std::vector<int>{});
  }
}

// One point of the Schur-type reduction: kernel vector from the rank
// normal form, Gram-Schmidt completion of the reversed column sequence,
// deflate the first column, recurse on the trailing block.
Mat nilpotent_reduce_point(const Mat& m, double rank_tol) {
  const int n = m.rows();
  if (n <= 1) return Mat::identity(n);
  if (m.max_abs() == 0.0) return Mat::identity(n);
  RankNormalForm rnf = rank_normal_form(m, rank_tol);
  std::vector<Vec> z(n);
  for (int i = 0; i < n; ++i) z[i] = rnf.right.col(n - 1 - i);
  Mat u1 = gram_schmidt(z);
  Mat t = u1.transpose() * m * u1;
  Mat u2 = nilpotent_reduce_point(t.block(1, 1, n - 1, n - 1), rank_tol);
  Mat ext = Mat::identity(n);
  ext.set_block(1, 1, u2);
  return u1 * ext;
}

}  // namespace

NilpotentReduction nilpotent_reduce(const std::vector<Mat>& samples,
                                    const Grid& grid, const Tolerances& tol) {
  if (static_cast<int>(samples.size()) != grid.total())
    throw Error(ErrorKind::DimensionMismatch,
                "nilpotent_reduce: sample count does not match the grid");
  NilpotentReduction out;
  const int n = samples.empty() ? 0 : samples[0].rows();
  double rank_tol = tol.rank_rel > 0 ? tol.rank_rel : default_rank_tol(n);
  // ranks are judged at the scale of the whole field so that samples made
  // of rounding noise count as zero
  double field_scale = 1.0;
  for (const Mat& m : samples) field_scale = std::max(field_scale, m.norm_inf());

  for (int flat = 0; flat < grid.total(); ++flat) {
    const Mat& m = samples[flat];
    if (!m.square() || m.rows() != n)
      throw Error(ErrorKind::DimensionMismatch,
                  "nilpotent_reduce: ragged sample orders");
    require_zero_spectrum(m, tol.eig_tol, flat);
    int r = rank_absolute(m, rank_tol * field_scale);
    if (flat == 0) {
      out.rank = r;
    } else if (r != out.rank) {
      throw Error(ErrorKind::RankChange,
                  "rank changes from " + std::to_string(out.rank) + " to " +
                      std::to_string(r) + " inside the grid",
                  {0, flat});
    }

    Mat u = nilpotent_reduce_point(m, rank_tol);

    // continuity: column sign flips against the predecessor
    int prev = grid.predecessor(flat);
    if (prev >= 0) {
      const Mat& up = out.u[prev];
      for (int j = 0; j < n; ++j) {
        double dp = dot(u.col(j), up.col(j));
        if (dp < 0)
          for (int i = 0; i < n; ++i) u(i, j) = -u(i, j);
      }
      double jump = 0;
      for (int j = 0; j < n; ++j) {
        Vec a = u.col(j), b = up.col(j);
        for (size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
        jump = std::max(jump, norm2(a));
      }
      if (jump > tol.continuity_jump) {
        std::ostringstream os;
        os << "LostContinuity: basis jump " << jump << " between grid points "
           << prev << " and " << flat << "; refine the grid to separate the"
           << " kernel selection";
        out.warnings.push_back(os.str());
      }
    }

    Mat full = u.transpose() * m * u;
    double scale = std::max(m.norm_inf(), 1.0);
    Mat strict(n, n);
    double defect = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (j > i)
          strict(i, j) = full(i, j);
        else
          defect = std::max(defect, std::abs(full(i, j)));
      }
    if (defect > 1e-9 * scale)
      throw Error(ErrorKind::NonzeroEigenvalue,
                  "reduction left a lower/diagonal residue " +
                      std::to_string(defect) + " at grid point " +
                      std::to_string(flat),
                  {flat});
    out.u.push_back(std::move(u));
    out.n.push_back(std::move(strict));
    auto idx = nilpotency_index(out.n.back(), 1e-10);
    out.max_index = std::max(out.max_index, idx.value_or(n));
  }
  return out;
}

namespace {

void check_gaps(const std::vector<SpectralCluster>& clusters, double gap_tol,
                int flat) {
  for (size_t i = 0; i < clusters.size(); ++i)
    for (size_t j = i + 1; j < clusters.size(); ++j) {
      double gap = std::abs(clusters[i].value - clusters[j].value);
      if (gap <= gap_tol)
        throw Error(ErrorKind::GapTooSmall,
                    "predicted clusters " + std::to_string(clusters[i].value) +
                        " and " + std::to_string(clusters[j].value) +
                        " separated by only " + std::to_string(gap),
                    {flat});
    }
}

// Observed spectrum must realize the predicted cluster multiset.
void check_cluster_match(const Mat& g, const std::vector<SpectralCluster>& cl,
                         int flat) {
  auto eig = eigenvalues(g);
  double min_gap = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < cl.size(); ++i)
    for (size_t j = i + 1; j < cl.size(); ++j)
      min_gap = std::min(min_gap, std::abs(cl[i].value - cl[j].value));
  std::vector<int> counts(cl.size(), 0);
  for (const auto& ev : eig) {
    size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < cl.size(); ++i) {
      double dist = std::abs(ev - std::complex<double>(cl[i].value, 0.0));
      if (dist < bd) { bd = dist; best = i; }
    }
    if (bd > min_gap / 2.5)
      throw Error(ErrorKind::ClusterMismatch,
                  "eigenvalue " + std::to_string(ev.real()) +
                      (ev.imag() >= 0 ? "+" : "") + std::to_string(ev.imag()) +
                      "i matches no predicted cluster",
                  {flat});
    counts[best] += 1;
  }
  for (size_t i = 0; i < cl.size(); ++i)
    if (counts[i] != cl[i].size)
      throw Error(ErrorKind::ClusterMismatch,
                  "cluster at " + std::to_string(cl[i].value) + " captured " +
                      std::to_string(counts[i]) + " eigenvalues, predicted " +
                      std::to_string(cl[i].size),
                  {flat});
}

struct PointSplit {
  Mat t;
  std::vector<Mat> blocks;
  double off_residual = 0;
};

PointSplit spectral_split_point(const Mat& g,
                                const std::vector<SpectralCluster>& clusters,
                                const std::vector<Mat>* v_prev,
                                std::vector<Mat>* v_out,
                                const Tolerances& tol, int flat,
                                std::vector<std::string>* warnings) {
  const int n = g.rows();
  check_gaps(clusters, tol.spectral_gap_tol, flat);
  check_cluster_match(g, clusters, flat);

  // invariant subspace of each cluster = range of the product annihilating
  // all the others
  std::vector<Mat> bases;
  for (size_t ci = 0; ci < clusters.size(); ++ci) {
    Mat f = Mat::identity(n);
    for (size_t cj = 0; cj < clusters.size(); ++cj) {
      if (cj == ci) continue;
      Mat fac = g - clusters[cj].value * Mat::identity(n);
      double s = fac.frobenius();
      if (s > 0) fac = (1.0 / s) * fac;
      for (int rep = 0; rep < clusters[cj].size; ++rep) f = f * fac;
    }
    Mat v = clusters.size() == 1 ? Mat::identity(n)
                                 : orthonormal_range_basis(f, clusters[ci].size);
    // continuity: orthogonal Procrustes alignment to the predecessor frame
    if (v_prev) {
      auto w = procrustes_align(v, (*v_prev)[ci]);
      if (w) {
        v = v * (*w);
      } else if (warnings) {
        warnings->push_back(
            "LostContinuity: cluster " + std::to_string(ci + 1) +
            " subspace rotated past alignment at grid point " +
            std::to_string(flat) + "; refine the grid");
      }
      double jump = 0;
      for (int j = 0; j < v.cols(); ++j) {
        Vec a = v.col(j), b = (*v_prev)[ci].col(j);
        for (size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
        jump = std::max(jump, norm2(a));
      }
      if (jump > tol.continuity_jump && warnings)
        warnings->push_back("LostContinuity: cluster " + std::to_string(ci + 1) +
                            " basis jump " + std::to_string(jump) +
                            " at grid point " + std::to_string(flat));
    }
    bases.push_back(v);
  }
  if (v_out) *v_out = bases;

  Mat t(n, n);
  {
    int pos = 0;
    for (const Mat& v : bases) {
      t.set_block(0, pos, v);
      pos += v.cols();
    }
  }
  Mat d = solve(t, g * t);

  std::vector<int> offs{0};
  for (const auto& c : clusters) offs.push_back(offs.back() + c.size);
  double gnorm = std::max(g.frobenius(), 1.0);

  // Sylvester sweeps to wipe the residual coupling
  for (int sweep = 0; sweep < 4; ++sweep) {
    double off = 0;
    for (size_t a = 0; a < clusters.size(); ++a)
      for (size_t b = 0; b < clusters.size(); ++b) {
        if (a == b) continue;
        Mat dab = d.block(offs[a], offs[b], clusters[a].size, clusters[b].size);
        off = std::max(off, dab.max_abs());
      }
    if (off <= tol.sylvester_rel * gnorm * 0.01) break;
    for (size_t a = 0; a < clusters.size(); ++a)
      for (size_t b = 0; b < clusters.size(); ++b) {
        if (a == b) continue;
        Mat daa = d.block(offs[a], offs[a], clusters[a].size, clusters[a].size);
        Mat dbb = d.block(offs[b], offs[b], clusters[b].size, clusters[b].size);
        Mat dab = d.block(offs[a], offs[b], clusters[a].size, clusters[b].size);
        Mat x = sylvester_solve(daa, dbb, -1.0 * dab,
                                tol.spectral_gap_tol / 2);
        Mat z = Mat::identity(n);
        z.set_block(offs[a], offs[b], x);
        Mat zinv = Mat::identity(n);
        zinv.set_block(offs[a], offs[b], -1.0 * x);
        d = zinv * d * z;
        t = t * z;
      }
  }

  PointSplit out;
  out.t = t;
  for (size_t c = 0; c < clusters.size(); ++c)
    out.blocks.push_back(d.block(offs[c], offs[c], clusters[c].size,
                                 clusters[c].size));
  double off = 0;
  for (size_t a = 0; a < clusters.size(); ++a)
    for (size_t b = 0; b < clusters.size(); ++b) {
      if (a == b) continue;
      off = std::max(off,
                     d.block(offs[a], offs[b], clusters[a].size,
                             clusters[b].size).max_abs());
    }
  out.off_residual = off;
  if (off > tol.sylvester_rel * gnorm)
    throw Error(ErrorKind::ClusterMismatch,
                "off-block residual " + std::to_string(off) +
                    " after decoupling sweeps",
                {flat});

  // block eigenvalue bookkeeping: the mean (trace/size) cancels the
  // clustering scatter and must sit on the prediction
  for (size_t c = 0; c < clusters.size(); ++c) {
    double tr = 0;
    for (int i = 0; i < clusters[c].size; ++i) tr += out.blocks[c](i, i);
    double mean = tr / clusters[c].size;
    if (std::abs(mean - clusters[c].value) > tol.eig_tol *
            (1 + std::abs(clusters[c].value)))
      throw Error(ErrorKind::ClusterMismatch,
                  "block " + std::to_string(c + 1) + " mean eigenvalue " +
                      std::to_string(mean) + " is off the predicted " +
                      std::to_string(clusters[c].value),
                  {flat});
  }
  return out;
}

}  // namespace

SpectralSplitResult spectral_split(
    const std::vector<Mat>& g,
    const std::vector<std::vector<SpectralCluster>>& clusters,
    const Grid& grid, const Tolerances& tol) {
  if (static_cast<int>(g.size()) != grid.total() ||
      clusters.size() != g.size())
    throw Error(ErrorKind::DimensionMismatch,
                "spectral_split: sample/cluster counts do not match the grid");
  SpectralSplitResult out;
  std::vector<std::vector<Mat>> frames(grid.total());
  for (int flat = 0; flat < grid.total(); ++flat) {
    int prev = grid.predecessor(flat);
    PointSplit ps = spectral_split_point(
        g[flat], clusters[flat], prev >= 0 ? &frames[prev] : nullptr,
        &frames[flat], tol, flat, &out.warnings);
    out.t.push_back(std::move(ps.t));
    out.blocks.push_back(std::move(ps.blocks));
    out.off_residual.push_back(ps.off_residual);
  }
  return out;
}

namespace {

[[noreturn]] void stage_error(const char* stage, const Error& e) {
  throw Error(e.kind(), std::string("[stage ") + stage + "] " + e.what(),
              e.points());
}

}  // namespace

CanonizeResult canonize(const Pencil& p, const SpectrumProfile& sp,
                        const ShiftFunction& shift, const Tolerances& tol) {
  const Grid g = p.grid();
  const int n = p.order();
  const int k = sp.branch_count();
  const int d = sp.d, l = sp.l, lhat = sp.lhat;

  CanonizeResult res;
  res.form.n = n;
  res.form.d = d;
  res.form.l = l;
  res.form.lhat = lhat;
  for (const auto& br : sp.branches) res.form.mults.push_back(br.multiplicity);
  res.form.j_blocks.resize(k);

  // stage 1-2: A1 = A + cB, G = A1^-1 B, spectral split along the
  // predicted clusters {1/(c-lambda_i)} x p_i, {1/c} x l, {0} x lhat
  std::vector<Mat> a_s(g.total()), b_s(g.total()), a1inv(g.total());
  std::vector<Mat> gmat(g.total());
  std::vector<std::vector<SpectralCluster>> clusters(g.total());
  for (int flat = 0; flat < g.total(); ++flat) {
    Point x = g.point(flat);
    a_s[flat] = p.a.eval(x);
    b_s[flat] = p.b.eval(x);
    double c = shift.at(flat);
    Mat a1 = a_s[flat] + c * b_s[flat];
    try {
      a1inv[flat] = inverse(a1);
    } catch (const Error& e) {
      stage_error("shift: A + cB inversion", e);
    }
    gmat[flat] = a1inv[flat] * b_s[flat];
    for (int i = 0; i < k; ++i)
      clusters[flat].push_back(
          {1.0 / (c - sp.branches[i].values[flat]), sp.branches[i].multiplicity});
    clusters[flat].push_back({1.0 / c, l});
    clusters[flat].push_back({0.0, lhat});
  }
  SpectralSplitResult split;
  try {
    split = spectral_split(gmat, clusters, g, tol);
  } catch (const Error& e) {
    stage_error("spectral split", e);
  }
  res.warnings.insert(res.warnings.end(), split.warnings.begin(),
                      split.warnings.end());

  // stage 3: unitary reduction of the N part (eigenvalue 0, order lhat)
  std::vector<Mat> n_parts(g.total());
  for (int flat = 0; flat < g.total(); ++flat)
    n_parts[flat] = split.blocks[flat][k + 1];
  NilpotentReduction n_red;
  try {
    n_red = nilpotent_reduce(n_parts, g, tol);
  } catch (const Error& e) {
    stage_error("nilpotent reduction of N", e);
  }
  res.warnings.insert(res.warnings.end(), n_red.warnings.begin(),
                      n_red.warnings.end());

  // stages 4-6 are pointwise once M-hat samples exist; collect them first
  std::vector<Mat> m_hats(g.total());
  std::vector<Mat> m_invs(g.total());
  for (int flat = 0; flat < g.total(); ++flat) {
    double c = shift.at(flat);
    const Mat& mb = split.blocks[flat][k];
    try {
      m_invs[flat] = inverse(mb);
    } catch (const Error& e) {
      stage_error("M block inversion", e);
    }
    m_hats[flat] = m_invs[flat] - c * Mat::identity(l);
  }
  NilpotentReduction m_red;
  try {
    m_red = nilpotent_reduce(m_hats, g, tol);
  } catch (const Error& e) {
    stage_error("nilpotent reduction of M-hat", e);
  }
  res.warnings.insert(res.warnings.end(), m_red.warnings.begin(),
                      m_red.warnings.end());

  for (int flat = 0; flat < g.total(); ++flat) {
    double c = shift.at(flat);
    const auto& blocks = split.blocks[flat];

    // stage 4: invert E - cJ_i and E - cN-hat, forming the lambda blocks
    std::vector<Mat> curly_j(k);
    Mat jbar_n;  // (E - c N-hat)^-1, unit upper triangular
    std::vector<Mat> jbar_blocks;
    for (int i = 0; i < k; ++i) {
      int pi = sp.branches[i].multiplicity;
      Mat e_cj = Mat::identity(pi) - c * blocks[i];
      Mat inv_e_cj;
      try {
        inv_e_cj = inverse(e_cj);
      } catch (const Error& e) {
        stage_error("E - cJ inversion", e);
      }
      curly_j[i] = inv_e_cj * blocks[i];
      jbar_blocks.push_back(std::move(inv_e_cj));
    }
    jbar_blocks.push_back(Mat::identity(l));
    {
      Mat e_cn = Mat::identity(lhat) - c * n_red.n[flat];
      jbar_n = unit_upper_inverse(e_cn);
      jbar_blocks.push_back(jbar_n);
    }
    Mat jbar = block_diag(jbar_blocks);
    Mat curly_n = jbar_n * n_red.n[flat];  // strictly upper by construction

    // stage 5-6: M-bar and the final unitary embedding
    Mat mbar_blocks = Mat::identity(n);
    mbar_blocks.set_block(d, d, m_invs[flat]);
    Mat u_tilde = Mat::identity(n);
    u_tilde.set_block(n - lhat, n - lhat, n_red.u[flat]);
    Mat u_hat = Mat::identity(n);
    u_hat.set_block(d, d, m_red.u[flat]);

    // stage 7: compose the transforms
    Mat t_inv;
    try {
      t_inv = inverse(split.t[flat]);
    } catch (const Error& e) {
      stage_error("T inversion", e);
    }
    Mat pmat = u_hat.transpose() * mbar_blocks * jbar * u_tilde.transpose() *
               t_inv * a1inv[flat];
    Mat qmat = split.t[flat] * u_tilde * u_hat;

    for (int i = 0; i < k; ++i) res.form.j_blocks[i].push_back(curly_j[i]);
    res.form.m_block.push_back(m_red.n[flat]);
    res.form.n_block.push_back(curly_n);

    Mat left = res.form.left_at(flat);
    Mat right = res.form.right_at(flat);
    double canon_tol =
        tol.canon_rel * (1 + a_s[flat].norm_inf() + b_s[flat].norm_inf());
    double ra = (pmat * a_s[flat] * qmat - left).max_abs();
    double rb = (pmat * b_s[flat] * qmat - right).max_abs();
    if (ra > canon_tol || rb > canon_tol)
      throw Error(ErrorKind::ClusterMismatch,
                  "[stage assembly] canonical residual " +
                      std::to_string(std::max(ra, rb)) + " above " +
                      std::to_string(canon_tol) + " at grid point " +
                      std::to_string(flat),
                  {flat});

    double cp = cond_inf(pmat), cq = cond_inf(qmat);
    if (cp > tol.cond_limit || cq > tol.cond_limit)
      throw Error(ErrorKind::ConditioningBlowup,
                  "cond(P) = " + std::to_string(cp) + ", cond(Q) = " +
                      std::to_string(cq) + " exceed the limit " +
                      std::to_string(tol.cond_limit),
                  {flat});

    res.pair.p.push_back(std::move(pmat));
    res.pair.q.push_back(std::move(qmat));
    res.pair.cond_p.push_back(cp);
    res.pair.cond_q.push_back(cq);
    res.pair.det_p.push_back(det(res.pair.p.back()));
    res.pair.det_q.push_back(det(res.pair.q.back()));
    res.pair.residual_a.push_back(ra);
    res.pair.residual_b.push_back(rb);
  }
  return res;
}

}  // namespace pencil
