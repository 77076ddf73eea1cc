#include "pencil/mat.hpp"

#include <cmath>

#include "pencil/errors.hpp"

namespace pencil {

Mat::Mat(int rows, int cols, std::initializer_list<double> entries)
    : rows_(rows), cols_(cols), a_(entries) {
  if (static_cast<int>(a_.size()) != rows * cols)
    throw Error(ErrorKind::DimensionMismatch,
                "initializer size does not match matrix shape");
}

Mat Mat::identity(int n) {
  Mat e(n, n);
  for (int i = 0; i < n; ++i) e(i, i) = 1.0;
  return e;
}

Mat Mat::diag(const Vec& d) {
  Mat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
  return m;
}

Mat Mat::transpose() const {
  Mat t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Vec Mat::col(int j) const {
  Vec v(rows_);
  for (int i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

Vec Mat::row(int i) const {
  Vec v(cols_);
  for (int j = 0; j < cols_; ++j) v[j] = (*this)(i, j);
  return v;
}

void Mat::set_col(int j, const Vec& v) {
  for (int i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

Mat Mat::block(int i0, int j0, int r, int c) const {
  Mat b(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) b(i, j) = (*this)(i0 + i, j0 + j);
  return b;
}

void Mat::set_block(int i0, int j0, const Mat& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) (*this)(i0 + i, j0 + j) = m(i, j);
}

double Mat::max_abs() const {
  double m = 0;
  for (double v : a_) m = std::max(m, std::abs(v));
  return m;
}

double Mat::norm_inf() const {
  double m = 0;
  for (int i = 0; i < rows_; ++i) {
    double s = 0;
    for (int j = 0; j < cols_; ++j) s += std::abs((*this)(i, j));
    m = std::max(m, s);
  }
  return m;
}

double Mat::frobenius() const {
  double s = 0;
  for (double v : a_) s += v * v;
  return std::sqrt(s);
}

Mat operator+(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorKind::DimensionMismatch, "matrix addition shape mismatch");
  Mat r(a.rows(), a.cols());
  for (size_t i = 0; i < a.a_.size(); ++i) r.a_[i] = a.a_[i] + b.a_[i];
  return r;
}

Mat operator-(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorKind::DimensionMismatch,
                "matrix subtraction shape mismatch");
  Mat r(a.rows(), a.cols());
  for (size_t i = 0; i < a.a_.size(); ++i) r.a_[i] = a.a_[i] - b.a_[i];
  return r;
}

Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows())
    throw Error(ErrorKind::DimensionMismatch, "matrix product shape mismatch");
  Mat r(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

Mat operator*(double s, const Mat& a) {
  Mat r = a;
  for (double& v : r.a_) v *= s;
  return r;
}

Vec Mat::operator*(const Vec& v) const {
  if (cols_ != static_cast<int>(v.size()))
    throw Error(ErrorKind::DimensionMismatch,
                "matrix-vector product shape mismatch");
  Vec r(rows_, 0.0);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
  return r;
}

double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

Mat block_diag(const std::vector<Mat>& blocks) {
  int n = 0;
  for (const Mat& b : blocks) n += b.rows();
  Mat r(n, n);
  int pos = 0;
  for (const Mat& b : blocks) {
    r.set_block(pos, pos, b);
    pos += b.rows();
  }
  return r;
}

}  // namespace pencil
