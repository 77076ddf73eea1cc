#include "pencil/pencil.hpp"

#include <string>

#include "pencil/errors.hpp"

namespace pencil {

MatrixFunction::MatrixFunction(int n, int var_count)
    : n_(n), vars_(var_count), e_(static_cast<size_t>(n) * n) {
  for (auto& e : e_) e = Expr::constant(0.0);
}

MatrixFunction MatrixFunction::identity(int n, int var_count) {
  MatrixFunction f(n, var_count);
  for (int i = 0; i < n; ++i) f.set(i, i, Expr::constant(1.0));
  return f;
}

MatrixFunction MatrixFunction::from_strings(
    const std::vector<std::vector<std::string>>& entries, int var_count) {
  const int n = static_cast<int>(entries.size());
  MatrixFunction f(n, var_count);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(entries[i].size()) != n)
      throw Error(ErrorKind::DimensionMismatch,
                  "matrix row " + std::to_string(i + 1) + " has " +
                      std::to_string(entries[i].size()) + " entries, want " +
                      std::to_string(n));
    for (int j = 0; j < n; ++j)
      f.set(i, j, parse_expr(entries[i][j], var_count));
  }
  return f;
}

Mat MatrixFunction::eval(std::span<const double> x) const {
  Mat m(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m(i, j) = at(i, j)->eval(x);
  return m;
}

std::vector<std::vector<std::string>> MatrixFunction::to_strings() const {
  std::vector<std::vector<std::string>> out(n_);
  for (int i = 0; i < n_; ++i) {
    out[i].resize(n_);
    for (int j = 0; j < n_; ++j) out[i][j] = at(i, j)->to_string();
  }
  return out;
}

void Pencil::validate() const {
  if (a.order() != b.order())
    throw Error(ErrorKind::DimensionMismatch, "pencil: A and B orders differ");
  if (a.order() < 1)
    throw Error(ErrorKind::SpecViolation, "pencil: order must be positive");
  if (a.var_count() != domain.dims() || b.var_count() != domain.dims())
    throw Error(ErrorKind::DimensionMismatch,
                "pencil: variable count does not match the domain");
  Grid g = grid();
  for (int flat = 0; flat < g.total(); ++flat) {
    Point x = g.point(flat);
    a.eval(x);  // throws EvalFault on a bad entry
    b.eval(x);
  }
}

std::vector<Mat> sample(const MatrixFunction& f, const Grid& grid) {
  std::vector<Mat> out;
  out.reserve(grid.total());
  for (int flat = 0; flat < grid.total(); ++flat)
    out.push_back(f.eval(grid.point(flat)));
  return out;
}

}  // namespace pencil
