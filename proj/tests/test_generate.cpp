#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "pencil/canonize.hpp"
#include "pencil/errors.hpp"
#include "pencil/generate.hpp"
#include "pencil/linalg.hpp"
#include "pencil/spectrum.hpp"
#include "pencil/verify.hpp"

using namespace pencil;

namespace {

StructureSpec ex1_shape() {
  StructureSpec s;
  s.n = 3;
  s.m = 2;
  s.d = 1;
  s.l = 1;
  s.lhat = 1;
  s.mults = {1};
  s.branch_exprs = {"-(x1+x2)"};
  s.seed = 42;
  return s;
}

}  // namespace

TEST_CASE("spec violations are rejected") {
  StructureSpec s = ex1_shape();
  s.mults = {2};  // sum != d
  CHECK_THROWS_AS(generate(s, Box{{1, 1}, {2, 2}}, {5, 5}), Error);
  try {
    generate(s, Box{{1, 1}, {2, 2}}, {5, 5});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SpecViolation);
  }

  s = ex1_shape();
  s.lhat = 0;
  s.d = 2;
  CHECK_THROWS_AS(generate(s, Box{{1, 1}, {2, 2}}, {5, 5}), Error);
}

TEST_CASE("branch separation is enforced on the grid") {
  StructureSpec s = ex1_shape();
  s.d = 2;
  s.lhat = 0;  // invalid anyway, fix sizes first
  s = ex1_shape();
  s.n = 4;
  s.d = 2;
  s.mults = {1, 1};
  s.branch_exprs = {"x1", "x1+1e-9"};  // collide everywhere
  CHECK_THROWS_AS(generate(s, Box{{1, 1}, {2, 2}}, {5, 5}), Error);

  s.branch_exprs = {"x1-1.5", "2"};  // first one vanishes inside the box
  try {
    generate(s, Box{{1, 1}, {2, 2}}, {5, 5});
    FAIL("expected BranchSeparation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BranchSeparation);
  }
}

TEST_CASE("identity-free ground truth: canonical pencil comes back verbatim") {
  // with seed-driven witnesses replaced by hand: use the generated witness
  // product to verify P0 (A + l B) Q0 = Ac + l Bc pointwise instead
  StructureSpec s = ex1_shape();
  GeneratedInstance inst = generate(s, Box{{1, 1}, {2, 2}}, {5, 5});
  Grid g = inst.pencil.grid();
  for (int flat = 0; flat < g.total(); flat += 3) {
    Point x = g.point(flat);
    Mat a = inst.pencil.a.eval(x), b = inst.pencil.b.eval(x);
    Mat p0 = inst.p0.eval(x), q0 = inst.q0.eval(x);
    Mat ac = inst.canon_a.eval(x), bc = inst.canon_b.eval(x);
    CHECK((p0 * a * q0 - ac).max_abs() <= 1e-11 * (1 + ac.norm_inf()));
    CHECK((p0 * b * q0 - bc).max_abs() <= 1e-11 * (1 + bc.norm_inf()));
    // canonical blocks have the prescribed shape
    CHECK(ac(0, 0) == 1.0);
    CHECK(bc(1, 1) == 1.0);
    CHECK(bc(0, 0) == doctest::Approx(1.0 / (x[0] + x[1])).epsilon(1e-12));
  }
}

TEST_CASE("witness conditioning stays within bounds") {
  for (std::uint64_t seed : {1ull, 7ull, 99ull, 12345ull}) {
    StructureSpec s = ex1_shape();
    s.seed = seed;
    GeneratedInstance inst = generate(s, Box{{1, 1}, {2, 2}}, {5, 5});
    Grid g = inst.pencil.grid();
    for (int flat = 0; flat < g.total(); ++flat) {
      Point x = g.point(flat);
      CHECK(cond_inf(inst.p0.eval(x)) <= 1e4);
      CHECK(cond_inf(inst.q0.eval(x)) <= 1e4);
    }
  }
}

TEST_CASE("determinism for a fixed seed") {
  StructureSpec s = ex1_shape();
  GeneratedInstance a = generate(s, Box{{1, 1}, {2, 2}}, {5, 5});
  GeneratedInstance b = generate(s, Box{{1, 1}, {2, 2}}, {5, 5});
  Grid g = a.pencil.grid();
  for (int flat = 0; flat < g.total(); flat += 5) {
    Point x = g.point(flat);
    CHECK((a.pencil.a.eval(x) - b.pencil.a.eval(x)).max_abs() == 0.0);
    CHECK((a.pencil.b.eval(x) - b.pencil.b.eval(x)).max_abs() == 0.0);
  }
}

TEST_CASE("round trip recovers the structure of an example-2 shape") {
  StructureSpec s;
  s.n = 3;
  s.m = 2;
  s.d = 0;
  s.l = 1;
  s.lhat = 2;
  s.mults = {};
  s.branch_exprs = {};
  s.n_pattern = superdiagonal_pattern(2);
  s.seed = 4242;
  GeneratedInstance inst = generate(s, Box{{1, 1}, {2, 2}}, {5, 5});

  SpectrumProfile sp = spectrum_profile(inst.pencil);
  CHECK(sp.l == 1);
  CHECK(sp.d == 0);
  CHECK(sp.lhat == 2);
  ShiftFunction shift = choose_shift(sp, inst.pencil);
  CanonizeResult cr = canonize(inst.pencil, sp, shift);
  Grid g = inst.pencil.grid();
  for (int flat = 0; flat < g.total(); ++flat) {
    const Mat& nb = cr.form.n_block[flat];
    CHECK((nb * nb).max_abs() <= 1e-9);
    CHECK(nb.max_abs() > 1e-6);
  }
  VerificationReport rep = verify_equivalence(inst.pencil, cr.pair, cr.form);
  CHECK(rep.pass);
}

TEST_CASE("round trip with a multiplicity-2 branch") {
  StructureSpec s;
  s.n = 4;
  s.m = 1;
  s.d = 2;
  s.l = 1;
  s.lhat = 1;
  s.mults = {2};
  s.branch_exprs = {"2+x1"};
  s.seed = 31337;
  GeneratedInstance inst = generate(s, Box{{1}, {2}}, {5});
  SpectrumProfile sp = spectrum_profile(inst.pencil);
  CHECK(sp.l == 1);
  CHECK(sp.d == 2);
  CHECK(sp.lhat == 1);
  REQUIRE(sp.branches.size() == 1);
  CHECK(sp.branches[0].multiplicity == 2);
  Grid g = inst.pencil.grid();
  for (int flat = 0; flat < g.total(); ++flat) {
    Point x = g.point(flat);
    CHECK(std::abs(sp.branches[0].values[flat] - (2 + x[0])) <= 1e-6);
  }
  ShiftFunction shift = choose_shift(sp, inst.pencil);
  CanonizeResult cr = canonize(inst.pencil, sp, shift);
  std::vector<int> got = cr.form.mults;
  std::sort(got.begin(), got.end());
  CHECK(got == std::vector<int>{2});
  VerificationReport rep = verify_equivalence(inst.pencil, cr.pair, cr.form);
  CHECK(rep.pass);
}
