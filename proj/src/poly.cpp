#include "pencil/poly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pencil/errors.hpp"

namespace pencil {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
using cd = std::complex<double>;
}  // namespace

RealPoly::RealPoly(std::vector<double> coeffs) : c_(std::move(coeffs)) {
  if (c_.empty()) c_.push_back(0.0);
  while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
  for (double v : c_)
    if (!std::isfinite(v))
      throw Error(ErrorKind::EvalFault, "non-finite polynomial coefficient");
}

double RealPoly::eval(double x) const {
  double r = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
  return r;
}

std::complex<double> RealPoly::eval(std::complex<double> x) const {
  cd r = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
  return r;
}

RealPoly RealPoly::derivative() const {
  if (degree() == 0) return RealPoly();
  std::vector<double> d(c_.size() - 1);
  for (size_t i = 1; i < c_.size(); ++i)
    d[i - 1] = static_cast<double>(i) * c_[i];
  return RealPoly(std::move(d));
}

RealPoly RealPoly::from_roots(
    double lead, const std::vector<std::pair<double, int>>& roots) {
  std::vector<double> c{lead};
  for (const auto& [r, m] : roots) {
    for (int k = 0; k < m; ++k) {
      // multiply by (x - r)
      c.push_back(0.0);
      for (size_t i = c.size() - 1; i > 0; --i)
        c[i] = c[i - 1] - r * c[i];
      c[0] = -r * c[0];
    }
  }
  return RealPoly(std::move(c));
}

namespace {

// Parlett-Reinsch balancing (powers of two), in place.
void balance(std::vector<double>& h, int n) {
  auto at = [&](int i, int j) -> double& { return h[i * n + j]; };
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      double r = 0, c = 0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        r += std::abs(at(i, j));
        c += std::abs(at(j, i));
      }
      if (r == 0 || c == 0) continue;
      double f = 1, s = c + r;
      while (c < r / 2) { c *= 2; r /= 2; f *= 2; }
      while (c >= r * 2) { c /= 2; r *= 2; f /= 2; }
      if (c + r < 0.95 * s && f != 1) {
        changed = true;
        for (int j = 0; j < n; ++j) at(i, j) /= f;
        for (int j = 0; j < n; ++j) at(j, i) *= f;
      }
    }
  }
}

// Eigenvalues of a complex upper Hessenberg matrix by the single-shift QR
// iteration with Wilkinson shifts.  Sized for n <= ~16.
std::vector<cd> hessenberg_qr_eigenvalues(std::vector<cd> h, int n) {
  auto at = [&](int i, int j) -> cd& { return h[i * n + j]; };
  std::vector<cd> eig;
  eig.reserve(n);
  int m = n - 1;
  int iters = 0;
  while (m >= 0) {
    if (m == 0) {
      eig.push_back(at(0, 0));
      break;
    }
    // deflation scan
    int l = m;
    while (l > 0) {
      double s = std::abs(at(l - 1, l - 1)) + std::abs(at(l, l));
      if (s == 0) s = 1;
      if (std::abs(at(l, l - 1)) <= 32 * kEps * s) {
        at(l, l - 1) = 0;
        break;
      }
      --l;
    }
    if (l == m) {
      eig.push_back(at(m, m));
      --m;
      iters = 0;
      continue;
    }
    if (++iters > 200)
      throw Error(ErrorKind::ComplexRoots,
                  "QR iteration failed to converge on companion matrix");
    // Wilkinson shift from the trailing 2x2 of the active window
    cd a = at(m - 1, m - 1), b = at(m - 1, m);
    cd c = at(m, m - 1), d = at(m, m);
    cd tr = a + d;
    cd disc = std::sqrt(tr * tr - 4.0 * (a * d - b * c));
    cd mu1 = (tr + disc) / 2.0, mu2 = (tr - disc) / 2.0;
    cd mu = std::abs(mu1 - d) < std::abs(mu2 - d) ? mu1 : mu2;
    if (iters % 16 == 0)
      mu = d + cd(1.0, 0.5) * std::abs(at(m, m - 1));  // exceptional shift
    for (int i = l; i <= m; ++i) at(i, i) -= mu;

    // QR sweep with complex Givens rotations
    std::vector<double> cs(m - l);
    std::vector<cd> sn(m - l);
    for (int i = l; i < m; ++i) {
      cd f = at(i, i), g = at(i + 1, i);
      double r = std::hypot(std::abs(f), std::abs(g));
      double cc;
      cd ss;
      if (r == 0 || std::abs(g) == 0) {
        cc = 1; ss = 0;
      } else if (std::abs(f) == 0) {
        cc = 0; ss = std::conj(g) / std::abs(g);
      } else {
        cc = std::abs(f) / r;
        ss = (f / std::abs(f)) * std::conj(g) / r;
      }
      cs[i - l] = cc;
      sn[i - l] = ss;
      for (int j = i; j <= m; ++j) {
        cd t1 = at(i, j), t2 = at(i + 1, j);
        at(i, j) = cc * t1 + ss * t2;
        at(i + 1, j) = -std::conj(ss) * t1 + cc * t2;
      }
    }
    for (int i = l; i < m; ++i) {
      double cc = cs[i - l];
      cd ss = sn[i - l];
      int top = l;
      int bot = std::min(i + 2, m);
      for (int r2 = top; r2 <= bot; ++r2) {
        cd t1 = at(r2, i), t2 = at(r2, i + 1);
        at(r2, i) = t1 * cc + t2 * std::conj(ss);
        at(r2, i + 1) = -t1 * ss + t2 * cc;
      }
    }
    for (int i = l; i <= m; ++i) at(i, i) += mu;
  }
  return eig;
}

double poly_scale_at(const RealPoly& p, cd z) {
  double az = std::max(1.0, std::abs(z));
  double s = 0, zp = 1;
  for (int i = 0; i <= p.degree(); ++i) {
    s += std::abs(p[i]) * zp;
    zp *= az;
  }
  return s;
}

}  // namespace

std::vector<std::complex<double>> all_roots(const RealPoly& p) {
  if (p.is_zero())
    throw Error(ErrorKind::SpecViolation,
                "roots of the zero polynomial are undefined");
  std::vector<double> c = p.coeffs();
  std::vector<cd> roots;
  // deflate exact zero roots first
  size_t z = 0;
  while (z + 1 < c.size() && c[z] == 0.0) ++z;
  for (size_t i = 0; i < z; ++i) roots.push_back(0.0);
  c.erase(c.begin(), c.begin() + z);
  int deg = static_cast<int>(c.size()) - 1;
  if (deg == 0) return roots;
  if (deg == 1) {
    roots.push_back(-c[0] / c[1]);
    return roots;
  }
  // companion matrix of the monic normalization
  std::vector<double> comp(deg * deg, 0.0);
  for (int i = 1; i < deg; ++i) comp[i * deg + (i - 1)] = 1.0;
  for (int i = 0; i < deg; ++i) comp[i * deg + (deg - 1)] = -c[i] / c[deg];
  balance(comp, deg);
  std::vector<cd> h(comp.begin(), comp.end());
  auto eig = hessenberg_qr_eigenvalues(std::move(h), deg);
  // snap rounding-level imaginary parts
  for (cd& r : eig) {
    if (std::abs(r.imag()) <= 128 * kEps * (1 + std::abs(r)))
      r = cd(r.real(), 0.0);
    roots.push_back(r);
  }
  return roots;
}

std::vector<RootCluster> poly_roots(const RealPoly& p, double cluster_tol,
                                    double imag_tol) {
  std::vector<cd> zs = all_roots(p);
  const int deg = static_cast<int>(zs.size());
  const int n = p.degree();

  // Multiplicity-aware agglomeration.  A multiplicity-s root scatters by
  // ~eps^(1/s) under the companion QR, so the merge radius grows with the
  // candidate size; above cluster_tol the merge must also be consistent
  // with the polynomial vanishing at the cluster mean.
  std::vector<bool> used(zs.size(), false);
  std::vector<std::pair<cd, int>> clusters;
  int remaining = deg;
  while (remaining > 0) {
    bool committed = false;
    for (int s = remaining; s >= 2 && !committed; --s) {
      for (size_t seed = 0; seed < zs.size() && !committed; ++seed) {
        if (used[seed]) continue;
        std::vector<size_t> avail;
        for (size_t j = 0; j < zs.size(); ++j)
          if (!used[j]) avail.push_back(j);
        std::sort(avail.begin(), avail.end(), [&](size_t a, size_t b) {
          return std::abs(zs[a] - zs[seed]) < std::abs(zs[b] - zs[seed]);
        });
        if (static_cast<int>(avail.size()) < s) continue;
        avail.resize(s);
        double diam = 0;
        cd mean = 0;
        for (size_t a : avail) mean += zs[a];
        mean /= static_cast<double>(s);
        for (size_t a : avail)
          for (size_t b : avail)
            diam = std::max(diam, std::abs(zs[a] - zs[b]));
        double scale = 1 + std::abs(mean);
        double tight = cluster_tol * scale;
        // the companion QR scatters an s-fold root by ~(eps*cond)^(1/s);
        // one extra root in the exponent absorbs the conditioning factor,
        // and the residual gate below rejects accidental merges
        double wide =
            std::max(tight, 8 * std::pow(kEps, 1.0 / (s + 1)) * scale);
        if (diam > wide) continue;
        if (diam > tight) {
          // extended radius: require the polynomial to vanish at the mean
          double resid = std::abs(p.eval(mean));
          if (resid > 256 * n * kEps * poly_scale_at(p, mean)) continue;
        }
        for (size_t a : avail) used[a] = true;
        clusters.emplace_back(mean, s);
        remaining -= s;
        committed = true;
      }
    }
    if (!committed) {
      for (size_t j = 0; j < zs.size(); ++j)
        if (!used[j]) {
          used[j] = true;
          clusters.emplace_back(zs[j], 1);
        }
      remaining = 0;
    }
  }

  std::vector<RootCluster> out;
  for (const auto& [z, mult] : clusters) {
    if (std::abs(z.imag()) > imag_tol * (1 + std::abs(z.real())))
      throw Error(ErrorKind::ComplexRoots,
                  "complex root " + std::to_string(z.real()) + " + " +
                      std::to_string(z.imag()) + "i");
    out.push_back({z.real(), mult});
  }
  std::sort(out.begin(), out.end(),
            [](const RootCluster& a, const RootCluster& b) {
              return a.value < b.value;
            });
  return out;
}

}  // namespace pencil
