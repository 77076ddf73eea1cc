#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "pencil/canonize.hpp"
#include "pencil/errors.hpp"
#include "pencil/spectrum.hpp"
#include "pencil/verify.hpp"

using namespace pencil;

namespace {

MatrixFunction ex1_p() {
  return MatrixFunction::from_strings({{"1/(x1+x2)", "0", "0"},
                                       {"0", "1/(x1*x2)", "0"},
                                       {"0", "-x1/x2", "1"}},
                                      2);
}

MatrixFunction ex1_q() {
  return MatrixFunction::from_strings(
      {{"1", "0", "0"}, {"0", "1", "x2/x1"}, {"0", "0", "1"}}, 2);
}

MatrixFunction ex1_target_a() {
  return MatrixFunction::from_strings(
      {{"1", "0", "0"}, {"0", "0", "0"}, {"0", "0", "1"}}, 2);
}

MatrixFunction ex1_target_b() {
  return MatrixFunction::from_strings(
      {{"1/(x1+x2)", "0", "0"}, {"0", "1", "0"}, {"0", "0", "0"}}, 2);
}

}  // namespace

TEST_CASE("first example's closed-form transforms verify") {
  Pencil p = fixtures::ex1_pencil();
  VerificationReport rep = verify_equivalence(p, ex1_p(), ex1_q(),
                                              ex1_target_a(), ex1_target_b());
  CHECK(rep.pass);
  CHECK(rep.max_residual_a <= 1e-10);
  CHECK(rep.max_residual_b <= 1e-10);
  CHECK(rep.min_abs_det_p > rep.det_floor);
  CHECK(rep.min_abs_det_q > rep.det_floor);
}

TEST_CASE("identity transforms against the pencil itself") {
  Pencil p = fixtures::ex1_pencil(5);
  MatrixFunction e = MatrixFunction::identity(3, 2);
  VerificationReport rep = verify_equivalence(p, e, e, p.a, p.b);
  CHECK(rep.pass);
  CHECK(rep.max_residual_a == 0.0);
  CHECK(rep.max_residual_b == 0.0);
}

TEST_CASE("tamper detection flips the verdict") {
  Pencil p = fixtures::ex1_pencil();
  Grid g = p.grid();
  std::vector<Mat> pm = sample(ex1_p(), g), qm = sample(ex1_q(), g);
  std::vector<Mat> ta = sample(ex1_target_a(), g), tb = sample(ex1_target_b(), g);
  qm[17](1, 2) += 1e-3;  // single-entry perturbation at one grid point
  VerificationReport rep = verify_equivalence(p, pm, qm, ta, tb, g);
  CHECK(!rep.pass);
  CHECK(rep.max_residual_a > rep.tolerance);
}

TEST_CASE("second example's closed-form transforms verify") {
  Pencil p = fixtures::ex2_pencil();
  MatrixFunction pm = MatrixFunction::from_strings(
      {{"-1/(x1^2*x2*(x1+x2))", "1/x1^2", "1/(x1^2*x2)"},
       {"(x2+sin(x1))/(x1*x2^2*(x1+x2)*sqrt(sin(x1)^2+1))", "0",
        "-sin(x1)/(x1*x2^2*sqrt(sin(x1)^2+1))"},
       {"(1-x2*sin(x1))/(x1*x2^2*(x1+x2)*sqrt(sin(x1)^2+1))", "0",
        "-1/(x1*x2^2*sqrt(sin(x1)^2+1))"}},
      2);
  MatrixFunction qm = MatrixFunction::from_strings(
      {{"1", "0", "0"},
       {"0", "sin(x1)/sqrt(sin(x1)^2+1)", "1/sqrt(sin(x1)^2+1)"},
       {"0", "1/sqrt(sin(x1)^2+1)", "-sin(x1)/sqrt(sin(x1)^2+1)"}},
      2);
  MatrixFunction ta = MatrixFunction::from_strings(
      {{"0", "0", "0"}, {"0", "1", "0"}, {"0", "0", "1"}}, 2);
  MatrixFunction tb = MatrixFunction::from_strings(
      {{"1", "0", "0"}, {"0", "0", "(1+sin(x1)^2)/x1"}, {"0", "0", "0"}}, 2);
  VerificationReport rep = verify_equivalence(p, pm, qm, ta, tb);
  CHECK(rep.pass);
  CHECK(rep.max_residual_a <= 1e-9);
  CHECK(rep.max_residual_b <= 1e-9);
  // phi at (1,1) evaluates near 1.708
  std::vector<double> x{1, 1};
  CHECK(tb.eval(x)(1, 2) ==
        doctest::Approx(1.7080734182735712).epsilon(1e-12));
}

TEST_CASE("canonize output verifies end to end") {
  for (const Pencil& p :
       {fixtures::ex1_pencil(5), fixtures::ex2_pencil(5)}) {
    SpectrumProfile sp = spectrum_profile(p);
    ShiftFunction shift = choose_shift(sp, p);
    CanonizeResult cr = canonize(p, sp, shift);
    VerificationReport rep = verify_equivalence(p, cr.pair, cr.form);
    CHECK(rep.pass);
    CHECK(rep.nilp_index_m.has_value());
    CHECK(rep.nilp_index_n.has_value());
  }
}

TEST_CASE("verify_similarity on the 3x3 example at random points") {
  MatrixFunction a = fixtures::similarity3();
  MatrixFunction u = fixtures::similarity3_u();
  MatrixFunction n = fixtures::similarity3_n();
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> ux(1, 2);
  std::vector<Mat> as, us, ns;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> x{ux(rng), ux(rng)};
    as.push_back(a.eval(x));
    us.push_back(u.eval(x));
    ns.push_back(n.eval(x));
  }
  SimilarityReport rep = verify_similarity(as, us, ns);
  CHECK(rep.pass);
  CHECK(rep.unitary_residual <= 1e-10);
  CHECK(rep.similarity_residual <= 1e-10);
  CHECK(rep.nilpotency == 3);
}

TEST_CASE("verify_similarity trivial and failing cases") {
  std::vector<Mat> zero{Mat(2, 2)}, eye{Mat::identity(2)};
  SimilarityReport rep = verify_similarity(zero, eye, zero);
  CHECK(rep.pass);
  CHECK(rep.nilpotency == 1);

  // A = E cannot be similar to a nilpotent
  rep = verify_similarity(eye, eye, zero);
  CHECK(!rep.pass);
  // and a non-nilpotent N is flagged
  rep = verify_similarity(eye, eye, eye);
  CHECK(!rep.pass);
  CHECK(!rep.nilpotency.has_value());
}

TEST_CASE("report determinism") {
  Pencil p = fixtures::ex1_pencil(5);
  MatrixFunction e = MatrixFunction::identity(3, 2);
  VerificationReport a = verify_equivalence(p, e, e, p.a, p.b);
  VerificationReport b = verify_equivalence(p, e, e, p.a, p.b);
  CHECK(a.pass == b.pass);
  CHECK(a.max_residual_a == b.max_residual_a);
  CHECK(a.residual_a == b.residual_a);
  CHECK(a.continuity_q.max_jump == b.continuity_q.max_jump);
}

TEST_CASE("dimension mismatch is rejected") {
  Pencil p = fixtures::ex1_pencil(5);
  Grid g = p.grid();
  std::vector<Mat> small(g.total(), Mat::identity(2));
  std::vector<Mat> ok(g.total(), Mat::identity(3));
  CHECK_THROWS_AS(verify_equivalence(p, small, ok, ok, ok, g), Error);
}
