#pragma once

// Shared in-code fixtures for the test suites: the two worked example
// pencils, and the similarity-reduction examples.

#include <string>
#include <vector>

#include "pencil/pencil.hpp"

namespace pencil::fixtures {

inline Pencil ex1_pencil(int grid = 9) {
  Pencil p;
  p.a = MatrixFunction::from_strings(
      {{"x1+x2", "0", "0"}, {"0", "0", "0"}, {"0", "0", "1"}}, 2);
  p.b = MatrixFunction::from_strings(
      {{"1", "0", "0"}, {"0", "x1*x2", "-x2^2"}, {"0", "x1^2", "-x1*x2"}}, 2);
  p.domain = Box{{1, 1}, {2, 2}};
  p.grid_counts = {grid, grid};
  return p;
}

inline Pencil ex2_pencil(int grid = 9) {
  Pencil p;
  p.a = MatrixFunction::from_strings({{"0", "0", "x1*x2*(x1+x2)"},
                                      {"0", "x1*x2", "0"},
                                      {"0", "-x1*x2*x2", "x1*x2"}},
                                     2);
  p.b = MatrixFunction::from_strings(
      {{"0", "(x1+x2)*x2", "-x2*sin(x1)*(x1+x2)"},
       {"x1^2", "x2*sin(x1)", "-x2*sin(x1)*sin(x1)"},
       {"0", "x2*(1-x2*sin(x1))", "x2*sin(x1)*(x2*sin(x1)-1)"}},
      2);
  p.domain = Box{{1, 1}, {2, 2}};
  p.grid_counts = {grid, grid};
  return p;
}

// 3x3 matrix-function with single zero eigenvalue, constant rank 2 on
// [1,2]^2 (rank drops to 1 only on the line x1+x2=0, outside that box)
inline MatrixFunction similarity3() {
  return MatrixFunction::from_strings({{"x1", "-1", "x1*(x1+x2)"},
                                       {"x1^2", "-x1", "-(x1+x2)"},
                                       {"0", "0", "0"}},
                                      2);
}

// its unitary reduction and the nilpotent result
inline MatrixFunction similarity3_u() {
  return MatrixFunction::from_strings(
      {{"1/sqrt(1+x1^2)", "x1/sqrt(1+x1^2)", "0"},
       {"x1/sqrt(1+x1^2)", "-1/sqrt(1+x1^2)", "0"},
       {"0", "0", "1"}},
      2);
}

inline MatrixFunction similarity3_n() {
  return MatrixFunction::from_strings(
      {{"0", "1+x1^2", "0"},
       {"0", "0", "(x1+x2)*sqrt(1+x1^2)"},
       {"0", "0", "0"}},
      2);
}

// 2x2 analytic matrix-function whose rank drops at the origin
inline MatrixFunction rankdrop2() {
  return MatrixFunction::from_strings(
      {{"x1*(x1+x2)", "-(x1+x2)^2"}, {"x1^2", "-x1*(x1+x2)"}}, 2);
}

}  // namespace pencil::fixtures
