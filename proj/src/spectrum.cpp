#include "pencil/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pencil/errors.hpp"
#include "pencil/linalg.hpp"

namespace pencil {

namespace {

std::string point_str(const Point& x) {
  std::ostringstream os;
  os.precision(6);
  os << "(";
  for (size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

// Interpolate det(A + lambda B) at n+1 Chebyshev nodes of the given radius.
std::vector<double> interp_coeffs(const Mat& a, const Mat& b, double radius) {
  const int n = a.rows();
  std::vector<double> nodes(n + 1), vals(n + 1);
  for (int j = 0; j <= n; ++j) {
    nodes[j] = radius * std::cos(M_PI * (2.0 * j + 1.0) / (2.0 * (n + 1)));
    vals[j] = det(a + nodes[j] * b);
  }
  std::vector<double> dd = vals;
  for (int k = 1; k <= n; ++k)
    for (int i = n; i >= k; --i)
      dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - k]);
  std::vector<double> c{dd[n]};
  for (int j = n - 1; j >= 0; --j) {
    c.insert(c.begin(), 0.0);
    for (size_t i = 0; i + 1 < c.size(); ++i) c[i] -= nodes[j] * c[i + 1];
    c[0] += dd[j];
  }
  return c;
}

void snap(std::vector<double>& c, double snap_rel) {
  double mx = 0;
  for (double v : c) mx = std::max(mx, std::abs(v));
  for (double& v : c)
    if (std::abs(v) < snap_rel * mx) v = 0.0;
}

RealPoly char_poly_mats(const Mat& a, const Mat& b, const Tolerances& tol) {
  std::vector<double> c = interp_coeffs(a, b, 2.0);
  // Fujiwara root bound; re-interpolate once when the roots sit well past
  // the first radius.  Keeping the radius near the root magnitudes keeps
  // the coefficient extraction well conditioned in both directions.
  int hi = static_cast<int>(c.size()) - 1;
  double mx = 0;
  for (double v : c) mx = std::max(mx, std::abs(v));
  while (hi > 0 && std::abs(c[hi]) < tol.snap_rel * mx) --hi;
  if (hi > 0 && c[hi] != 0.0) {
    double rho = 1.0;
    for (int i = 0; i < hi; ++i)
      rho = std::max(rho, 2.0 * std::pow(std::abs(c[i] / c[hi]),
                                         1.0 / (hi - i)));
    if (rho > 8.0)
      c = interp_coeffs(a, b, std::min(1.25 * rho, 1e8));
  }
  snap(c, tol.snap_rel);
  return RealPoly(std::move(c));
}

struct PointRoots {
  int zero_mult = 0;
  std::vector<RootCluster> nonzero;  // ascending
  int low = 0, high = 0;             // l and l+d read off the coefficients
  std::vector<double> s_coeffs;      // S_low .. S_high
};

PointRoots roots_at(const Pencil& p, const Grid& g, int flat,
                    const Tolerances& tol) {
  Point x = g.point(flat);
  RealPoly cp = char_poly_mats(p.a.eval(x), p.b.eval(x), tol);
  if (cp.is_zero())
    throw Error(ErrorKind::SingularPencil,
                "det(A + lambda B) vanishes identically at " + point_str(x),
                {flat});
  PointRoots out;
  const auto& c = cp.coeffs();
  int low = 0;
  while (c[low] == 0.0) ++low;
  out.low = low;
  out.high = cp.degree();
  out.zero_mult = low;
  out.s_coeffs.assign(c.begin() + low, c.end());
  std::vector<double> reduced(c.begin() + low, c.end());
  RealPoly q{std::move(reduced)};
  if (q.degree() > 0) {
    std::vector<RootCluster> rc;
    try {
      rc = poly_roots(q, tol.cluster_tol, tol.imag_tol);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ComplexRoots)
        throw Error(ErrorKind::ComplexRoots,
                    std::string(e.what()) + " at " + point_str(x), {flat});
      throw;
    }
    for (const auto& r : rc) {
      if (std::abs(r.value) <= tol.cluster_tol * 2)
        throw Error(ErrorKind::RootCollision,
                    "nonzero root branch collides with the zero root at " +
                        point_str(x),
                    {flat});
      out.nonzero.push_back(r);
    }
  }
  return out;
}

}  // namespace

RealPoly char_poly_at(const Pencil& p, std::span<const double> x,
                      const Tolerances& tol) {
  return char_poly_mats(p.a.eval(x), p.b.eval(x), tol);
}

SpectrumProfile spectrum_profile(const Pencil& p, const Tolerances& tol) {
  const Grid g = p.grid();
  const int n = p.order();

  SpectrumProfile sp;
  sp.n = n;

  std::vector<PointRoots> pts(g.total());
  for (int flat = 0; flat < g.total(); ++flat)
    pts[flat] = roots_at(p, g, flat, tol);

  // structural split must be identical everywhere
  const PointRoots& first = pts[0];
  sp.l = first.zero_mult;
  sp.d = 0;
  for (const auto& r : first.nonzero) sp.d += r.multiplicity;
  sp.lhat = n - sp.l - sp.d;
  for (int flat = 1; flat < g.total(); ++flat) {
    if (pts[flat].zero_mult != sp.l)
      throw Error(ErrorKind::MultiplicityChange,
                  "zero-root multiplicity changes between " +
                      point_str(g.point(0)) + " (l=" + std::to_string(sp.l) +
                      ") and " + point_str(g.point(flat)) + " (l=" +
                      std::to_string(pts[flat].zero_mult) + ")",
                  {0, flat});
  }
  if (sp.l == 0)
    throw Error(ErrorKind::FullRank,
                "0 is not a root of det(A + lambda B); det A(x) != 0, so"
                " rank A = n");
  if (sp.lhat == 0)
    throw Error(ErrorKind::FullRank,
                "deg det(A + lambda B) = n; det B(x) != 0, so rank B = n");

  // branch identities: roots never cross, so the ascending order is stable;
  // multiplicity patterns must agree pointwise
  const int k = static_cast<int>(first.nonzero.size());
  for (int flat = 1; flat < g.total(); ++flat) {
    if (static_cast<int>(pts[flat].nonzero.size()) != k)
      throw Error(ErrorKind::MultiplicityChange,
                  "number of distinct roots changes between " +
                      point_str(g.point(0)) + " and " +
                      point_str(g.point(flat)),
                  {0, flat});
    for (int i = 0; i < k; ++i)
      if (pts[flat].nonzero[i].multiplicity != first.nonzero[i].multiplicity)
        throw Error(ErrorKind::MultiplicityChange,
                    "root multiplicity pattern changes between " +
                        point_str(g.point(0)) + " and " +
                        point_str(g.point(flat)),
                    {0, flat});
  }
  // collision guard between adjacent branches
  for (int flat = 0; flat < g.total(); ++flat)
    for (int i = 0; i + 1 < k; ++i) {
      double a = pts[flat].nonzero[i].value;
      double b = pts[flat].nonzero[i + 1].value;
      if (b - a <= tol.cluster_tol * (1 + std::abs(a)))
        throw Error(ErrorKind::RootCollision,
                    "branches " + std::to_string(i + 1) + " and " +
                        std::to_string(i + 2) + " closer than cluster_tol at " +
                        point_str(g.point(flat)),
                    {flat});
    }

  sp.branches.resize(k);
  for (int i = 0; i < k; ++i) {
    sp.branches[i].multiplicity = first.nonzero[i].multiplicity;
    sp.branches[i].values.resize(g.total());
    for (int flat = 0; flat < g.total(); ++flat)
      sp.branches[i].values[flat] = pts[flat].nonzero[i].value;
  }
  sp.s_coeffs.resize(g.total());
  for (int flat = 0; flat < g.total(); ++flat) {
    if (pts[flat].low != sp.l || pts[flat].high != sp.l + sp.d)
      throw Error(ErrorKind::MultiplicityChange,
                  "coefficient support changes at " +
                      point_str(g.point(flat)),
                  {flat});
    sp.s_coeffs[flat] = pts[flat].s_coeffs;
  }

  // continuity diagnostic: adjacent-branch jumps against the local
  // finite-difference scale estimated from three successive points
  for (int i = 0; i < k; ++i) {
    double max_ratio = 0;
    int where = -1;
    for (int flat = 0; flat < g.total(); ++flat) {
      int prev = g.predecessor(flat);
      if (prev < 0) continue;
      int prev2 = g.predecessor(prev);
      if (prev2 < 0 || g.predecessor_axis(flat) != g.predecessor_axis(prev))
        continue;
      double j1 =
          std::abs(sp.branches[i].values[flat] - sp.branches[i].values[prev]);
      double j0 =
          std::abs(sp.branches[i].values[prev] - sp.branches[i].values[prev2]);
      double scale = std::max(j0, 1e-12 * (1 + std::abs(sp.branches[i].values[prev])));
      if (j1 / scale > max_ratio) { max_ratio = j1 / scale; where = flat; }
    }
    if (max_ratio > 50 && where >= 0) {
      std::ostringstream os;
      os << "branch " << (i + 1) << " jump ratio " << max_ratio << " near "
         << point_str(g.point(where)) << " exceeds the local Lipschitz scale";
      sp.warnings.push_back(os.str());
    }
  }
  return sp;
}

RankProfile rank_profile(const Pencil& p, const Tolerances& tol) {
  const Grid g = p.grid();
  const int n = p.order();
  double rank_tol = tol.rank_rel > 0 ? tol.rank_rel : default_rank_tol(n);
  RankProfile rp;
  for (int flat = 0; flat < g.total(); ++flat) {
    Point x = g.point(flat);
    int ra = rank(p.a.eval(x), rank_tol);
    int rb = rank(p.b.eval(x), rank_tol);
    if (flat == 0) {
      rp.rank_a = ra;
      rp.rank_b = rb;
    } else {
      if (ra != rp.rank_a)
        throw Error(ErrorKind::RankChange,
                    "rank A changes from " + std::to_string(rp.rank_a) +
                        " at " + point_str(g.point(0)) + " to " +
                        std::to_string(ra) + " at " + point_str(x),
                    {0, flat});
      if (rb != rp.rank_b)
        throw Error(ErrorKind::RankChange,
                    "rank B changes from " + std::to_string(rp.rank_b) +
                        " at " + point_str(g.point(0)) + " to " +
                        std::to_string(rb) + " at " + point_str(x),
                    {0, flat});
    }
  }
  if (rp.rank_a >= n)
    throw Error(ErrorKind::FullRank, "rank A = n on the grid");
  if (rp.rank_b >= n)
    throw Error(ErrorKind::FullRank, "rank B = n on the grid");
  return rp;
}

namespace {

bool shift_acceptable(double c, const SpectrumProfile& sp, const Pencil& p,
                      const Grid& g, const Tolerances& tol, int flat,
                      double* margin) {
  if (std::abs(c) <= tol.separation_tol) return false;
  double m = std::abs(c);
  for (const auto& br : sp.branches)
    m = std::min(m, std::abs(c - br.values[flat]));
  if (margin) *margin = m;
  if (m <= tol.separation_tol) return false;
  Point x = g.point(flat);
  Mat a = p.a.eval(x), b = p.b.eval(x);
  double dd = std::abs(det(a + c * b));
  double floor_ = tol.regularity_rel * std::max(a.norm_inf(), 1.0);
  return dd > floor_;
}

}  // namespace

ShiftFunction choose_shift(const SpectrumProfile& sp, const Pencil& p,
                           const Tolerances& tol,
                           std::optional<double> forced) {
  const Grid g = p.grid();
  auto accept_everywhere = [&](double c, double* worst) {
    double w = std::numeric_limits<double>::infinity();
    for (int flat = 0; flat < g.total(); ++flat) {
      double m = 0;
      if (!shift_acceptable(c, sp, p, g, tol, flat, &m)) {
        if (worst) *worst = m;
        return false;
      }
      w = std::min(w, m);
    }
    if (worst) *worst = w;
    return true;
  };

  if (forced) {
    double w = 0;
    if (!accept_everywhere(*forced, &w))
      throw Error(ErrorKind::NoShiftFound,
                  "forced shift c=" + std::to_string(*forced) +
                      " rejected; worst margin " + std::to_string(w));
    return {true, *forced, {}};
  }

  std::vector<double> candidates{1.0, -1.0};
  // midpoints between globally separated branch ranges, and around zero
  const int k = sp.branch_count();
  std::vector<std::pair<double, double>> ranges;  // [min,max] per branch
  for (const auto& br : sp.branches) {
    auto [mn, mx] = std::minmax_element(br.values.begin(), br.values.end());
    ranges.emplace_back(*mn, *mx);
  }
  ranges.emplace_back(0.0, 0.0);  // the zero root participates in gaps
  std::sort(ranges.begin(), ranges.end());
  for (int i = 0; i + 1 <= static_cast<int>(ranges.size()) - 1; ++i)
    if (ranges[i].second < ranges[i + 1].first)
      candidates.push_back((ranges[i].second + ranges[i + 1].first) / 2);

  double worst = 0;
  for (double c : candidates)
    if (accept_everywhere(c, &worst)) return {true, c, {}};

  // fallback: per-point midpoint of the gap between 0 and the nearest
  // branch, on a consistent side so that c inherits branch continuity
  bool positive_side = true;
  {
    bool pos_ok = k > 0, neg_ok = k > 0;
    for (const auto& br : sp.branches) {
      for (double v : br.values) {
        if (v <= 0) pos_ok = pos_ok && false;
        if (v >= 0) neg_ok = neg_ok && false;
      }
    }
    // prefer a branch family strictly on one side of zero
    positive_side = pos_ok || !neg_ok;
    if (!pos_ok && !neg_ok && k > 0) {
      // mixed signs: use the smallest-|value| branch's side at point 0
      double best = std::numeric_limits<double>::infinity();
      for (const auto& br : sp.branches)
        if (std::abs(br.values[0]) < std::abs(best)) best = br.values[0];
      positive_side = best > 0;
    }
  }
  if (k > 0) {
    ShiftFunction sf;
    sf.constant = false;
    sf.values.resize(g.total());
    bool ok = true;
    for (int flat = 0; flat < g.total() && ok; ++flat) {
      double pick = std::numeric_limits<double>::infinity();
      for (const auto& br : sp.branches) {
        double v = br.values[flat];
        if (positive_side ? v > 0 : v < 0)
          if (std::abs(v) < std::abs(pick)) pick = v;
      }
      if (!std::isfinite(pick)) { ok = false; break; }
      sf.values[flat] = pick / 2;  // midpoint of the (0, nearest root) gap
      ok = shift_acceptable(sf.values[flat], sp, p, g, tol, flat, nullptr);
    }
    if (ok) return sf;
  }
  throw Error(ErrorKind::NoShiftFound,
              "no admissible shift: all constant candidates and the root-gap"
              " fallback violate the separation or regularity margins (last"
              " margin " + std::to_string(worst) + ")");
}

RankDegreeClassification rank_degree_classify(const Pencil& p,
                                              const SpectrumProfile& sp,
                                              const Tolerances& tol) {
  const Grid g = p.grid();
  RankDegreeClassification rd;
  rd.lambda_degree = sp.l + sp.d;

  // mu-degree of det(mu A + B) by the same interpolation with roles swapped
  int mu_deg = -1;
  for (int flat = 0; flat < g.total(); ++flat) {
    Point x = g.point(flat);
    RealPoly q = char_poly_mats(p.b.eval(x), p.a.eval(x), tol);
    if (flat == 0)
      mu_deg = q.degree();
    else if (q.degree() != mu_deg)
      throw Error(ErrorKind::MultiplicityChange,
                  "deg_mu det(mu A + B) changes across the grid", {0, flat});
  }
  rd.mu_degree = mu_deg;

  double rank_tol = tol.rank_rel > 0 ? tol.rank_rel : default_rank_tol(p.order());
  rd.rank_a = rank(p.a.eval(g.point(0)), rank_tol);
  rd.rank_b = rank(p.b.eval(g.point(0)), rank_tol);
  rd.rank_b_matches_lambda_degree = rd.rank_b == rd.lambda_degree;
  rd.rank_a_matches_mu_degree = rd.rank_a == rd.mu_degree;

  bool simple = sp.l == 1;
  for (const auto& br : sp.branches) simple = simple && br.multiplicity == 1;
  rd.remark2_simple = rd.criterion() && simple;
  return rd;
}

}  // namespace pencil
