#include "pencil/grid.hpp"

#include <string>

#include "pencil/errors.hpp"

namespace pencil {

bool Box::contains(const Point& x) const {
  if (static_cast<int>(x.size()) != dims()) return false;
  for (int i = 0; i < dims(); ++i)
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  return true;
}

void Box::validate() const {
  if (lo.size() != hi.size() || lo.empty())
    throw Error(ErrorKind::SpecViolation, "box: axis count mismatch or empty");
  for (size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i]))
      throw Error(ErrorKind::SpecViolation,
                  "box: axis " + std::to_string(i + 1) +
                      " needs lower < upper");
}

Grid::Grid(Box box, std::vector<int> counts)
    : box_(std::move(box)), counts_(std::move(counts)) {
  box_.validate();
  if (static_cast<int>(counts_.size()) != box_.dims())
    throw Error(ErrorKind::SpecViolation, "grid: counts do not match axes");
  for (int c : counts_)
    if (c < 3)
      throw Error(ErrorKind::SpecViolation,
                  "grid: at least 3 points per axis required");
  strides_.assign(counts_.size(), 1);
  for (int i = static_cast<int>(counts_.size()) - 2; i >= 0; --i)
    strides_[i] = strides_[i + 1] * counts_[i + 1];
  total_ = strides_[0] * counts_[0];
}

Point Grid::point(int flat) const {
  std::vector<int> idx = unflatten(flat);
  Point x(dims());
  for (int i = 0; i < dims(); ++i)
    x[i] = box_.lo[i] +
           idx[i] * (box_.hi[i] - box_.lo[i]) / (counts_[i] - 1);
  return x;
}

std::vector<int> Grid::unflatten(int flat) const {
  std::vector<int> idx(counts_.size());
  for (size_t i = 0; i < counts_.size(); ++i) {
    idx[i] = flat / strides_[i];
    flat %= strides_[i];
  }
  return idx;
}

int Grid::flatten(const std::vector<int>& idx) const {
  int flat = 0;
  for (size_t i = 0; i < counts_.size(); ++i) flat += idx[i] * strides_[i];
  return flat;
}

int Grid::predecessor(int flat) const {
  if (flat == 0) return -1;
  std::vector<int> idx = unflatten(flat);
  for (int i = static_cast<int>(idx.size()) - 1; i >= 0; --i)
    if (idx[i] > 0) {
      idx[i] -= 1;
      return flatten(idx);
    }
  return -1;
}

int Grid::predecessor_axis(int flat) const {
  std::vector<int> idx = unflatten(flat);
  for (int i = static_cast<int>(idx.size()) - 1; i >= 0; --i)
    if (idx[i] > 0) return i;
  return -1;
}

double Grid::step(int axis) const {
  return (box_.hi[axis] - box_.lo[axis]) / (counts_[axis] - 1);
}

}  // namespace pencil
