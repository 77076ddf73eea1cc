#pragma once

// Real univariate polynomials and root extraction with multiplicity.

#include <complex>
#include <vector>

namespace pencil {

/// Coefficients ascending: p(x) = c[0] + c[1] x + ... + c[deg] x^deg.
/// Exact trailing zeros are trimmed; the zero polynomial is degree 0, c0=0.
class RealPoly {
 public:
  RealPoly() : c_{0.0} {}
  explicit RealPoly(std::vector<double> coeffs);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  double operator[](int i) const { return c_[i]; }
  const std::vector<double>& coeffs() const { return c_; }
  bool is_zero() const { return c_.size() == 1 && c_[0] == 0.0; }

  double eval(double x) const;
  std::complex<double> eval(std::complex<double> x) const;
  RealPoly derivative() const;

  /// lead * prod (x - r_i)^{m_i}, expanded.
  static RealPoly from_roots(
      double lead, const std::vector<std::pair<double, int>>& roots);

 private:
  std::vector<double> c_;
};

struct RootCluster {
  double value = 0.0;
  int multiplicity = 0;
};

/// All complex roots via the balanced companion matrix and shifted QR
/// iteration.  No clustering; multiple roots come back scattered.
std::vector<std::complex<double>> all_roots(const RealPoly& p);

/// Real roots with multiplicities, sorted ascending.  Near-coincident
/// approximations are merged into multiplicity clusters and reported at the
/// cluster mean; roots with genuine imaginary parts raise
/// Error(ComplexRoots).
std::vector<RootCluster> poly_roots(const RealPoly& p,
                                    double cluster_tol = 1e-6,
                                    double imag_tol = 1e-7);

}  // namespace pencil
