#pragma once

// Small dense real matrices (row-major), sized for pencil orders n <= ~12.

#include <cassert>
#include <initializer_list>
#include <vector>

namespace pencil {

using Vec = std::vector<double>;

class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {
    assert(rows >= 0 && cols >= 0);
  }
  Mat(int rows, int cols, std::initializer_list<double> entries);

  static Mat identity(int n);
  static Mat diag(const Vec& d);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(int i, int j) {
    assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
    return a_[static_cast<size_t>(i) * cols_ + j];
  }
  double operator()(int i, int j) const {
    assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
    return a_[static_cast<size_t>(i) * cols_ + j];
  }

  Mat transpose() const;
  Vec col(int j) const;
  Vec row(int i) const;
  void set_col(int j, const Vec& v);
  Mat block(int i0, int j0, int r, int c) const;
  void set_block(int i0, int j0, const Mat& m);

  /// Largest absolute entry.
  double max_abs() const;
  /// Induced infinity norm (max absolute row sum).
  double norm_inf() const;
  double frobenius() const;

  friend Mat operator+(const Mat& a, const Mat& b);
  friend Mat operator-(const Mat& a, const Mat& b);
  friend Mat operator*(const Mat& a, const Mat& b);
  friend Mat operator*(double s, const Mat& a);
  Vec operator*(const Vec& v) const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& v);

/// diag{blocks...} assembled into one square matrix.
Mat block_diag(const std::vector<Mat>& blocks);

}  // namespace pencil
