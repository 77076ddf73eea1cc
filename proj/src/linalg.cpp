#include "pencil/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pencil/errors.hpp"

namespace pencil {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_square(const Mat& m, const char* who) {
  if (!m.square())
    throw Error(ErrorKind::NonSquare, std::string(who) + ": matrix not square");
}

double max_column_norm(const Mat& m) {
  double best = 0;
  for (int j = 0; j < m.cols(); ++j) best = std::max(best, norm2(m.col(j)));
  return best;
}

}  // namespace

double default_rank_tol(int n) {
  return n * std::pow(2.0, -40.0);
}

double det(const Mat& m) {
  require_square(m, "det");
  const int n = m.rows();
  if (n == 0) return 1.0;
  Mat a = m;
  double scale = max_column_norm(m);
  double floor_ = default_rank_tol(n) * scale;
  double d = 1.0;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (std::abs(a(piv, k)) <= floor_) return 0.0;
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      d = -d;
    }
    d *= a(k, k);
    for (int i = k + 1; i < n; ++i) {
      double f = a(i, k) / a(k, k);
      for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return d;
}

namespace {

// Gauss-Jordan with partial pivoting on [a | rhs]; rhs overwritten.
void gauss_jordan(Mat a, Mat& rhs, const char* who) {
  const int n = a.rows();
  double scale = std::max(max_column_norm(a), kEps);
  double floor_ = default_rank_tol(n) * scale;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (std::abs(a(piv, k)) <= floor_)
      throw Error(ErrorKind::SingularMatrix,
                  std::string(who) + ": pivot below rank tolerance");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      for (int j = 0; j < rhs.cols(); ++j) std::swap(rhs(k, j), rhs(piv, j));
    }
    double inv = 1.0 / a(k, k);
    for (int j = 0; j < n; ++j) a(k, j) *= inv;
    for (int j = 0; j < rhs.cols(); ++j) rhs(k, j) *= inv;
    for (int i = 0; i < n; ++i) {
      if (i == k) continue;
      double f = a(i, k);
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) a(i, j) -= f * a(k, j);
      for (int j = 0; j < rhs.cols(); ++j) rhs(i, j) -= f * rhs(k, j);
    }
  }
}

}  // namespace

Mat inverse(const Mat& m) {
  require_square(m, "inverse");
  Mat rhs = Mat::identity(m.rows());
  gauss_jordan(m, rhs, "inverse");
  return rhs;
}

Mat solve(const Mat& a, const Mat& b) {
  require_square(a, "solve");
  if (a.rows() != b.rows())
    throw Error(ErrorKind::DimensionMismatch, "solve: shape mismatch");
  Mat rhs = b;
  gauss_jordan(a, rhs, "solve");
  return rhs;
}

Vec solve(const Mat& a, const Vec& b) {
  Mat rhs(static_cast<int>(b.size()), 1);
  for (size_t i = 0; i < b.size(); ++i) rhs(static_cast<int>(i), 0) = b[i];
  Mat x = solve(a, rhs);
  return x.col(0);
}

namespace {

int rank_pivoted(const Mat& m, double rel_tol, double abs_floor) {
  std::vector<Vec> cols(m.cols());
  for (int j = 0; j < m.cols(); ++j) cols[j] = m.col(j);
  std::vector<bool> taken(cols.size(), false);
  double first_pivot = 0;
  int r = 0;
  std::vector<Vec> basis;
  for (size_t step = 0; step < cols.size(); ++step) {
    int best = -1;
    double best_norm = -1;
    for (size_t j = 0; j < cols.size(); ++j) {
      if (taken[j]) continue;
      double nj = norm2(cols[j]);
      if (nj > best_norm) { best_norm = nj; best = static_cast<int>(j); }
    }
    if (best < 0) break;
    if (step == 0) first_pivot = best_norm;
    double limit = std::max(rel_tol * first_pivot, abs_floor);
    if (first_pivot == 0 || best_norm <= limit) break;
    taken[best] = true;
    Vec q = cols[best];
    double nq = norm2(q);
    for (double& v : q) v /= nq;
    basis.push_back(q);
    ++r;
    for (size_t j = 0; j < cols.size(); ++j) {
      if (taken[j]) continue;
      double pr = dot(q, cols[j]);
      for (size_t i = 0; i < q.size(); ++i) cols[j][i] -= pr * q[i];
    }
  }
  return r;
}

}  // namespace

int rank(const Mat& m, double rel_tol) {
  if (rel_tol <= 0) rel_tol = default_rank_tol(std::max(m.rows(), m.cols()));
  return rank_pivoted(m, rel_tol, 0.0);
}

int rank_absolute(const Mat& m, double abs_floor) {
  return rank_pivoted(m, 0.0, abs_floor);
}

RankNormalForm rank_normal_form(const Mat& m, double rel_tol) {
  require_square(m, "rank_normal_form");
  const int n = m.rows();
  if (rel_tol <= 0) rel_tol = default_rank_tol(n);
  Mat a = m;
  Mat right = Mat::identity(n);
  double scale = a.max_abs();
  int r = 0;
  for (int k = 0; k < n; ++k) {
    // complete pivoting, row-major scan for ties
    int pi = k, pj = k;
    double best = 0;
    for (int i = k; i < n; ++i)
      for (int j = k; j < n; ++j)
        if (std::abs(a(i, j)) > best) { best = std::abs(a(i, j)); pi = i; pj = j; }
    if (scale == 0 || best <= rel_tol * scale) break;
    if (pi != k)
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(pi, j));
    if (pj != k) {
      for (int i = 0; i < n; ++i) std::swap(a(i, k), a(i, pj));
      for (int i = 0; i < n; ++i) std::swap(right(i, k), right(i, pj));
    }
    for (int i = k + 1; i < n; ++i) {
      double f = a(i, k) / a(k, k);
      if (f == 0.0) continue;
      for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
    for (int j = k + 1; j < n; ++j) {
      double f = a(k, j) / a(k, k);
      if (f == 0.0) continue;
      for (int i = 0; i < n; ++i) a(i, j) -= f * a(i, k);
      for (int i = 0; i < n; ++i) right(i, j) -= f * right(i, k);
    }
    ++r;
  }
  return {right, r};
}

Mat gram_schmidt(const std::vector<Vec>& columns, double rel_tol) {
  if (columns.empty())
    throw Error(ErrorKind::DependentColumns, "gram_schmidt: no columns");
  const int n = static_cast<int>(columns[0].size());
  Mat q(n, static_cast<int>(columns.size()));
  std::vector<Vec> basis;
  for (size_t jc = 0; jc < columns.size(); ++jc) {
    Vec v = columns[jc];
    if (static_cast<int>(v.size()) != n)
      throw Error(ErrorKind::DimensionMismatch,
                  "gram_schmidt: ragged column lengths");
    double in_norm = norm2(v);
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& b : basis) {
        double pr = dot(b, v);
        for (int i = 0; i < n; ++i) v[i] -= pr * b[i];
      }
    double nv = norm2(v);
    if (nv <= rel_tol * std::max(in_norm, 1.0))
      throw Error(ErrorKind::DependentColumns,
                  "gram_schmidt: column " + std::to_string(jc + 1) +
                      " dependent on its predecessors");
    for (double& x : v) x /= nv;
    basis.push_back(v);
    q.set_col(static_cast<int>(jc), v);
  }
  return q;
}

Mat sylvester_solve(const Mat& f, const Mat& g, const Mat& c, double gap_tol) {
  require_square(f, "sylvester_solve");
  require_square(g, "sylvester_solve");
  const int nf = f.rows(), ng = g.rows();
  if (c.rows() != nf || c.cols() != ng)
    throw Error(ErrorKind::DimensionMismatch,
                "sylvester_solve: right-hand side shape mismatch");
  auto ef = eigenvalues(f);
  auto eg = eigenvalues(g);
  double gap = std::numeric_limits<double>::infinity();
  for (auto& a : ef)
    for (auto& b : eg) gap = std::min(gap, std::abs(a - b));
  if (!(gap > gap_tol))
    throw Error(ErrorKind::SpectraOverlap,
                "sylvester_solve: spectral gap " + std::to_string(gap) +
                    " below tolerance");
  // vec equation: (E (x) F - G^T (x) E) vec(X) = vec(C), column-major vec
  const int nn = nf * ng;
  Mat k(nn, nn);
  for (int j = 0; j < ng; ++j)
    for (int i = 0; i < nf; ++i) {
      int row = j * nf + i;
      for (int i2 = 0; i2 < nf; ++i2) k(row, j * nf + i2) += f(i, i2);
      for (int j2 = 0; j2 < ng; ++j2) k(row, j2 * nf + i) -= g(j2, j);
    }
  Vec rhs(nn);
  for (int j = 0; j < ng; ++j)
    for (int i = 0; i < nf; ++i) rhs[j * nf + i] = c(i, j);
  Vec xv = solve(k, rhs);
  Mat x(nf, ng);
  for (int j = 0; j < ng; ++j)
    for (int i = 0; i < nf; ++i) x(i, j) = xv[j * nf + i];
  return x;
}

std::optional<int> nilpotency_index(const Mat& m, double tol) {
  require_square(m, "nilpotency_index");
  const int n = m.rows();
  double base = m.norm_inf();
  if (base == 0.0) return 1;
  Mat p = m;
  double bound = base;
  for (int k = 1; k <= n; ++k) {
    if (k > 1) {
      p = p * m;
      bound *= base;
    }
    if (p.norm_inf() <= tol * bound) return k;
  }
  return std::nullopt;
}

namespace {

// Expand Newton divided differences over the given nodes into monomial
// coefficients.
std::vector<double> newton_to_monomial(const std::vector<double>& nodes,
                                       std::vector<double> dd) {
  const int m = static_cast<int>(nodes.size());
  std::vector<double> c{dd[m - 1]};
  for (int j = m - 2; j >= 0; --j) {
    c.insert(c.begin(), 0.0);
    for (size_t i = 0; i + 1 < c.size(); ++i) c[i] -= nodes[j] * c[i + 1];
    c[0] += dd[j];
  }
  return c;
}

}  // namespace

RealPoly char_poly(const Mat& m) {
  require_square(m, "char_poly");
  const int n = m.rows();
  if (n == 0) return RealPoly({1.0});
  double radius = 1.1 * std::max(1.0, m.norm_inf());
  std::vector<double> nodes(n + 1), vals(n + 1);
  for (int j = 0; j <= n; ++j) {
    nodes[j] = radius * std::cos(M_PI * (2.0 * j + 1.0) / (2.0 * (n + 1)));
    Mat s = Mat::identity(n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) s(i, k) = (i == k ? nodes[j] : 0.0) - m(i, k);
    vals[j] = det(s);
  }
  // divided differences
  std::vector<double> dd = vals;
  for (int k = 1; k <= n; ++k)
    for (int i = n; i >= k; --i)
      dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - k]);
  std::vector<double> c = newton_to_monomial(nodes, dd);
  // monic by construction up to rounding
  double lead = c[n];
  for (double& v : c) v /= lead;
  return RealPoly(std::move(c));
}

std::vector<std::complex<double>> eigenvalues(const Mat& m) {
  return all_roots(char_poly(m));
}

Mat orthonormal_range_basis(const Mat& f, int q, double rank_tol) {
  const int n = f.rows();
  std::vector<Vec> cols(f.cols());
  for (int j = 0; j < f.cols(); ++j) cols[j] = f.col(j);
  std::vector<bool> taken(cols.size(), false);
  Mat v(n, q);
  double first_pivot = 0;
  for (int step = 0; step < q; ++step) {
    int best = -1;
    double best_norm = -1;
    for (size_t j = 0; j < cols.size(); ++j) {
      if (taken[j]) continue;
      double nj = norm2(cols[j]);
      if (nj > best_norm) { best_norm = nj; best = static_cast<int>(j); }
    }
    if (step == 0) first_pivot = best_norm;
    if (best < 0 || first_pivot == 0 || best_norm <= rank_tol * first_pivot)
      throw Error(ErrorKind::ClusterMismatch,
                  "invariant subspace has rank below the predicted " +
                      std::to_string(q));
    taken[best] = true;
    Vec qv = cols[best];
    // re-orthogonalize against accepted basis (two passes)
    for (int pass = 0; pass < 2; ++pass)
      for (int b = 0; b < step; ++b) {
        Vec bb = v.col(b);
        double pr = dot(bb, qv);
        for (int i = 0; i < n; ++i) qv[i] -= pr * bb[i];
      }
    double nq = norm2(qv);
    if (nq <= rank_tol * std::max(first_pivot, 1.0))
      throw Error(ErrorKind::ClusterMismatch,
                  "invariant subspace collapsed during orthogonalization");
    for (double& x : qv) x /= nq;
    v.set_col(step, qv);
    for (size_t j = 0; j < cols.size(); ++j) {
      if (taken[j]) continue;
      double pr = dot(qv, cols[j]);
      for (int i = 0; i < n; ++i) cols[j][i] -= pr * qv[i];
    }
  }
  // the next pivot must be negligible, otherwise the range is bigger than q
  double next_norm = 0;
  for (size_t j = 0; j < cols.size(); ++j)
    if (!taken[j]) next_norm = std::max(next_norm, norm2(cols[j]));
  if (first_pivot > 0 && next_norm > std::sqrt(rank_tol) * first_pivot)
    throw Error(ErrorKind::ClusterMismatch,
                "invariant subspace has rank above the predicted " +
                    std::to_string(q));
  return v;
}

std::optional<Mat> procrustes_align(const Mat& v, const Mat& v_prev) {
  const int q = v.cols();
  Mat s = v.transpose() * v_prev;
  if (q == 0) return Mat(0, 0);
  // Newton polar iteration; S must be nonsingular (subspaces not orthogonal)
  Mat w = s;
  for (int it = 0; it < 60; ++it) {
    Mat winv;
    try {
      winv = inverse(w);
    } catch (const Error&) {
      return std::nullopt;
    }
    Mat next = 0.5 * (w + winv.transpose());
    double delta = (next - w).max_abs();
    w = next;
    if (delta <= 1e-14 * std::max(1.0, w.max_abs())) break;
  }
  Mat check = w.transpose() * w - Mat::identity(q);
  if (check.max_abs() > 1e-8) return std::nullopt;
  return w;
}

Mat unit_upper_inverse(const Mat& u) {
  require_square(u, "unit_upper_inverse");
  const int n = u.rows();
  Mat inv = Mat::identity(n);
  // back substitution column by column; strictly-lower part stays zero
  for (int j = 0; j < n; ++j)
    for (int i = j - 1; i >= 0; --i) {
      double s = 0;
      for (int k = i + 1; k <= j; ++k) s += u(i, k) * inv(k, j);
      inv(i, j) = -s / u(i, i);
    }
  for (int i = 0; i < n; ++i) inv(i, i) = 1.0 / u(i, i);
  return inv;
}

double cond_inf(const Mat& m) {
  try {
    return m.norm_inf() * inverse(m).norm_inf();
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace pencil
