#pragma once

// Sample grids over box domains.  Grid points are visited in lexicographic
// order (axis 0 most significant); continuity tracking aligns each point
// against its predecessor.

#include <vector>

namespace pencil {

using Point = std::vector<double>;

struct Box {
  std::vector<double> lo, hi;  // per axis, lo[i] < hi[i]

  int dims() const { return static_cast<int>(lo.size()); }
  bool contains(const Point& x) const;
  void validate() const;  // Error(SpecViolation) unless lo < hi everywhere
};

class Grid {
 public:
  Grid() = default;
  Grid(Box box, std::vector<int> counts);  // counts per axis, each >= 3

  int dims() const { return box_.dims(); }
  int total() const { return total_; }
  const Box& box() const { return box_; }
  const std::vector<int>& counts() const { return counts_; }

  Point point(int flat) const;
  std::vector<int> unflatten(int flat) const;
  int flatten(const std::vector<int>& idx) const;

  /// Predecessor in lexicographic order used for continuity alignment:
  /// the neighbor along the innermost axis with index > 0, else along the
  /// next axis out.  -1 for the first point.
  int predecessor(int flat) const;

  /// Axis along which flat and predecessor(flat) differ.
  int predecessor_axis(int flat) const;

  double step(int axis) const;

 private:
  Box box_;
  std::vector<int> counts_;
  std::vector<int> strides_;
  int total_ = 0;
};

}  // namespace pencil
