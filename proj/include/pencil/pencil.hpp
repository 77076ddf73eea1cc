#pragma once

// The pencil A(x) + lambda B(x) with entries given as expression trees,
// together with its box domain and sample grid.

#include <span>
#include <string>
#include <vector>

#include "pencil/expr.hpp"
#include "pencil/grid.hpp"
#include "pencil/mat.hpp"

namespace pencil {

class MatrixFunction {
 public:
  MatrixFunction() = default;
  MatrixFunction(int n, int var_count);

  static MatrixFunction identity(int n, int var_count);
  static MatrixFunction from_strings(
      const std::vector<std::vector<std::string>>& entries, int var_count);

  int order() const { return n_; }
  int var_count() const { return vars_; }

  const ExprPtr& at(int i, int j) const { return e_[i * n_ + j]; }
  void set(int i, int j, ExprPtr e) { e_[i * n_ + j] = std::move(e); }

  Mat eval(std::span<const double> x) const;
  std::vector<std::vector<std::string>> to_strings() const;

 private:
  int n_ = 0, vars_ = 0;
  std::vector<ExprPtr> e_;
};

struct Pencil {
  MatrixFunction a, b;
  Box domain;
  std::vector<int> grid_counts;

  int order() const { return a.order(); }
  int vars() const { return domain.dims(); }
  Grid grid() const { return Grid(domain, grid_counts); }

  /// Orders, variable counts and grid sanity; evaluates every entry at
  /// every grid point so later stages cannot hit a latent fault.
  void validate() const;
};

/// Sample a matrix-function over a grid.
std::vector<Mat> sample(const MatrixFunction& f, const Grid& grid);

}  // namespace pencil
