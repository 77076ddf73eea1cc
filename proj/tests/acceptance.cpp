// Acceptance suite: end-to-end criteria over the worked examples, the
// negative fixtures, the generator round-trip matrix and the randomized
// invariant suites.  One PASS/FAIL line is printed per criterion.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "pencil/canonize.hpp"
#include "pencil/commands.hpp"
#include "pencil/errors.hpp"
#include "pencil/generate.hpp"
#include "pencil/io.hpp"
#include "pencil/linalg.hpp"
#include "pencil/spectrum.hpp"
#include "pencil/verify.hpp"

using namespace pencil;
using nlohmann::json;

namespace {

std::string fixture(const std::string& name) {
  return std::string(FIXTURE_DIR) + "/" + name;
}

struct Criterion {
  const char* label;
  bool ok = true;
  std::vector<std::string> failures;

  explicit Criterion(const char* l) : label(l) {}
  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      failures.push_back(what);
    }
    CHECK_MESSAGE(cond, label << ": " << what);
  }
  ~Criterion() {
    std::printf("ACCEPTANCE %-60s %s\n", label, ok ? "PASS" : "FAIL");
    for (const auto& f : failures) std::printf("    failed: %s\n", f.c_str());
    std::fflush(stdout);
  }
};

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch())
      .count();
}

json run_cmd(int (*cmd)(const std::string&, const CommandOptions&,
                        std::ostream&),
             const std::string& path, int* code) {
  std::ostringstream os;
  CommandOptions opt;
  int c = cmd(path, opt, os);
  if (code) *code = c;
  return json::parse(os.str());
}

}  // namespace

TEST_CASE("criterion 1: first example end to end") {
  Criterion cr("1 example-1 analyze+canonize, 9x9, <= 5 s");
  double t0 = now_seconds();

  int code = 0;
  json aj = run_cmd(run_analyze, fixture("ex1.pencil"), &code);
  cr.expect(code == 0, "analyze exit code 0");
  cr.expect(aj["spectrum"]["l"] == 1 && aj["spectrum"]["d"] == 1 &&
                aj["spectrum"]["lhat"] == 1,
            "structure l=1, d=1, lhat=1");

  // branch against -(x1+x2) pointwise
  Pencil p = fixtures::ex1_pencil();
  Grid g = p.grid();
  cr.expect(g.total() == 81, "81 grid points");
  auto values = aj["spectrum"]["branches"][0]["values"];
  double worst = 0;
  for (int flat = 0; flat < g.total(); ++flat) {
    Point x = g.point(flat);
    worst = std::max(worst,
                     std::abs(values[flat].get<double>() + x[0] + x[1]));
  }
  cr.expect(worst <= 1e-9, "branch error <= 1e-9 (got " +
                               std::to_string(worst) + ")");

  json cj = run_cmd(run_canonize, fixture("ex1.pencil"), &code);
  cr.expect(code == 0, "canonize exit code 0");
  double max_resid = std::max(cj["residuals"]["max_a"].get<double>(),
                              cj["residuals"]["max_b"].get<double>());
  cr.expect(max_resid <= 1e-8, "canonical residual <= 1e-8");
  // left diag{1,0,1}, right diag{1/(x1+x2), 1, 0}
  double worst_canon = 0;
  for (int flat = 0; flat < g.total(); ++flat) {
    Point x = g.point(flat);
    double m00 = cj["canonical"]["m_block"][flat][0][0].get<double>();
    double j00 = cj["canonical"]["j_blocks"][0][flat][0][0].get<double>();
    double n00 = cj["canonical"]["n_block"][flat][0][0].get<double>();
    worst_canon = std::max({worst_canon, std::abs(m00),
                            std::abs(j00 - 1.0 / (x[0] + x[1])),
                            std::abs(n00)});
  }
  cr.expect(worst_canon <= 1e-8,
            "canonical blocks match diag{1,0,1} + l diag{1/(x1+x2),1,0}");

  double dt = now_seconds() - t0;
  cr.expect(dt <= 5.0, "runtime " + std::to_string(dt) + " s <= 5 s");
}

TEST_CASE("criterion 2: first example's closed-form transforms") {
  Criterion cr("2 example-1 P,Q verify at 1e-10");
  std::ostringstream os;
  int code = run_verify(fixture("ex1.pencil"), fixture("ex1_transforms.txt"),
                        {}, os);
  json j = json::parse(os.str());
  cr.expect(code == 0, "verify exit code 0");
  double r = std::max(j["report"]["max_residual_a"].get<double>(),
                      j["report"]["max_residual_b"].get<double>());
  cr.expect(r <= 1e-10, "max residual " + std::to_string(r) + " <= 1e-10");
}

TEST_CASE("criterion 3: second example end to end") {
  Criterion cr("3 example-2 structure, N block, P,Q verify");
  int code = 0;
  json aj = run_cmd(run_analyze, fixture("ex2.pencil"), &code);
  cr.expect(code == 0, "analyze exit code 0");
  cr.expect(aj["spectrum"]["l"] == 1 && aj["spectrum"]["d"] == 0 &&
                aj["spectrum"]["lhat"] == 2,
            "structure l=1, d=0, lhat=2");
  cr.expect(aj["rank_degree"]["criterion"] == false,
            "rank-degree criterion fails");
  cr.expect(aj["rank"]["rank_b"] == 2 &&
                aj["rank_degree"]["lambda_degree"] == 1,
            "rank B = 2 vs lambda-degree 1");

  json cj = run_cmd(run_canonize, fixture("ex2.pencil"), &code);
  cr.expect(code == 0, "canonize exit code 0");
  Pencil p = fixtures::ex2_pencil();
  Grid g = p.grid();
  double worst_sq = 0, least_norm = 1e300;
  for (int flat = 0; flat < g.total(); ++flat) {
    Mat nb(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j2 = 0; j2 < 2; ++j2)
        nb(i, j2) = cj["canonical"]["n_block"][flat][i][j2].get<double>();
    worst_sq = std::max(worst_sq, (nb * nb).max_abs());
    least_norm = std::min(least_norm, nb.max_abs());
  }
  cr.expect(worst_sq <= 1e-9, "||N^2|| <= 1e-9 at all points");
  cr.expect(least_norm >= 1e-3, "||N|| >= 1e-3 at all points (got " +
                                    std::to_string(least_norm) + ")");

  std::ostringstream os;
  code = run_verify(fixture("ex2.pencil"), fixture("ex2_transforms.txt"), {},
                    os);
  json vj = json::parse(os.str());
  cr.expect(code == 0, "verify exit code 0");
  double r = std::max(vj["report"]["max_residual_a"].get<double>(),
                      vj["report"]["max_residual_b"].get<double>());
  cr.expect(r <= 1e-9, "max residual " + std::to_string(r) + " <= 1e-9");

  // phi evaluates near 1.708 at (1,1) (independently computed value)
  TransformsFile tf = read_transforms_file(fixture("ex2_transforms.txt"), 2);
  std::vector<double> x{1, 1};
  double phi = tf.target->second.eval(x)(1, 2);
  cr.expect(std::abs(phi - 1.7080734182735712) <= 1e-12,
            "phi(1,1) = " + std::to_string(phi) + " near 1.708");
}

TEST_CASE("criterion 4: similarity lemma fixture") {
  Criterion cr("4 3x3 similarity: printed U,N at 50 points + reduction");
  MatrixFunction a = fixtures::similarity3();
  MatrixFunction u = fixtures::similarity3_u();
  MatrixFunction n = fixtures::similarity3_n();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> ux(1, 2);
  std::vector<Mat> as, us, ns;
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x{ux(rng), ux(rng)};
    as.push_back(a.eval(x));
    us.push_back(u.eval(x));
    ns.push_back(n.eval(x));
  }
  SimilarityReport rep = verify_similarity(as, us, ns);
  cr.expect(rep.pass, "printed U, N verify");
  cr.expect(rep.unitary_residual <= 1e-10, "U unitary at 1e-10");
  cr.expect(rep.similarity_residual <= 1e-10,
            "similarity residual <= 1e-10 (got " +
                std::to_string(rep.similarity_residual) + ")");

  Grid g(Box{{1, 1}, {2, 2}}, {9, 9});
  std::vector<Mat> field = sample(a, g);
  NilpotentReduction red = nilpotent_reduce(field, g);
  bool upper_ok = true, resid_ok = true, index_ok = true;
  for (int flat = 0; flat < g.total(); ++flat) {
    const Mat& nf = red.n[flat];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j <= i; ++j) upper_ok = upper_ok && nf(i, j) == 0.0;
    resid_ok = resid_ok &&
               (red.u[flat].transpose() * field[flat] * red.u[flat] - nf)
                       .max_abs() <= 1e-9;
    index_ok = index_ok && nilpotency_index(nf, 1e-10) == 3;
  }
  cr.expect(upper_ok, "reduction strictly upper triangular");
  cr.expect(resid_ok, "reduction residual <= 1e-9");
  cr.expect(index_ok, "nilpotency index 3 across the grid");
}

TEST_CASE("criterion 5: negative fixtures") {
  Criterion cr("5 negatives: RankChange, SingularPencil(2), ComplexRoots");
  // variable-rank 2x2 on a box containing the origin
  Pencil p;
  p.a = fixtures::rankdrop2();
  p.b = MatrixFunction::from_strings({{"1", "0"}, {"0", "1"}}, 2);
  p.domain = Box{{-1, -1}, {1, 1}};
  p.grid_counts = {9, 9};
  bool rank_change = false;
  try {
    rank_profile(p);
  } catch (const Error& e) {
    rank_change = e.kind() == ErrorKind::RankChange;
  }
  cr.expect(rank_change, "2x2 counterexample triggers RankChange");

  // the same matrix under nilpotent_reduce
  Grid g(Box{{-1, -1}, {1, 1}}, {9, 9});
  bool reduce_rank_change = false;
  try {
    nilpotent_reduce(sample(fixtures::rankdrop2(), g), g);
  } catch (const Error& e) {
    reduce_rank_change = e.kind() == ErrorKind::RankChange;
  }
  cr.expect(reduce_rank_change, "nilpotent_reduce reports RankChange");

  int code = 0;
  json j = run_cmd(run_analyze, fixture("singular.pencil"), &code);
  cr.expect(code == 2, "singular pencil exits with code 2");
  cr.expect(j["error"]["kind"] == "SingularPencil",
            "error kind is SingularPencil");

  j = run_cmd(run_analyze, fixture("complex_roots.pencil"), &code);
  cr.expect(code == 2, "complex-root pencil exits with code 2");
  cr.expect(j["error"]["kind"] == "ComplexRoots",
            "error kind is ComplexRoots");
}

namespace {

const char* branch_catalog(int idx, int m) {
  static const char* m1[] = {"2",    "-3",   "6+x1", "-(x1+5)",
                             "4+0.5*sin(x1)", "-1.5", "0.5"};
  static const char* m2[] = {"2",    "-3",   "6+x1", "-(x1+5)",
                             "4+0.5*sin(x1)", "-1.5", "10+x2"};
  return (m >= 2 ? m2 : m1)[idx % 7];
}

}  // namespace

TEST_CASE("criterion 6: generator round-trip matrix") {
  Criterion cr("6 50 seeded generator instances, <= 60 s");
  double t0 = now_seconds();
  int failures = 0;
  std::string first_failure;
  for (int s = 1; s <= 50; ++s) {
    StructureSpec spec;
    spec.seed = 1000 + s;
    spec.n = 3 + (s % 4);        // 3..6
    spec.m = 1 + (s % 3);        // 1..3
    spec.l = 1 + (s % 2 && spec.n >= 5 ? 1 : 0);
    spec.lhat = 1 + (s % 3 == 0 && spec.n - spec.l >= 3 ? 1 : 0);
    spec.d = spec.n - spec.l - spec.lhat;
    int d = spec.d;
    int bi = s;  // rotate through the catalog
    if (d >= 2 && s % 3 == 0) {
      spec.mults.push_back(2);
      spec.branch_exprs.push_back(branch_catalog(bi++, spec.m));
      d -= 2;
    }
    while (d > 0) {
      spec.mults.push_back(1);
      spec.branch_exprs.push_back(branch_catalog(bi++, spec.m));
      --d;
    }
    Box box;
    box.lo.assign(spec.m, 1.0);
    box.hi.assign(spec.m, 2.0);
    std::vector<int> counts(spec.m, 5);
    std::string tag = "seed " + std::to_string(spec.seed) + " n=" +
                      std::to_string(spec.n) + " m=" + std::to_string(spec.m);
    try {
      GeneratedInstance inst = generate(spec, box, counts);
      SpectrumProfile sp = spectrum_profile(inst.pencil);
      bool ok = sp.l == spec.l && sp.d == spec.d && sp.lhat == spec.lhat;
      std::vector<int> want = spec.mults, got;
      for (const auto& br : sp.branches) got.push_back(br.multiplicity);
      std::sort(want.begin(), want.end());
      std::sort(got.begin(), got.end());
      ok = ok && want == got;
      // lambda branches within 1e-6 pointwise
      Grid gg = inst.pencil.grid();
      double berr = 0;
      for (size_t b = 0; b < spec.branch_exprs.size(); ++b) {
        ExprPtr e = parse_expr(spec.branch_exprs[b], spec.m);
        for (int flat = 0; flat < gg.total(); ++flat) {
          double wantv = e->eval(gg.point(flat));
          double best = 1e300;
          for (const auto& br : sp.branches)
            best = std::min(best, std::abs(br.values[flat] - wantv));
          berr = std::max(berr, best);
        }
      }
      ok = ok && berr <= 1e-6;
      ShiftFunction shift = choose_shift(sp, inst.pencil);
      CanonizeResult res = canonize(inst.pencil, sp, shift);
      std::vector<int> rec = res.form.mults;
      std::sort(rec.begin(), rec.end());
      ok = ok && res.form.d == spec.d && res.form.l == spec.l &&
           res.form.lhat == spec.lhat && rec == want;
      double resid = 0;
      for (size_t i = 0; i < res.pair.residual_a.size(); ++i)
        resid = std::max({resid, res.pair.residual_a[i],
                          res.pair.residual_b[i]});
      ok = ok && resid <= 1e-6;
      if (!ok) {
        ++failures;
        if (first_failure.empty())
          first_failure = tag + " (berr=" + std::to_string(berr) +
                          " resid=" + std::to_string(resid) + ")";
      }
    } catch (const Error& e) {
      ++failures;
      if (first_failure.empty())
        first_failure = tag + " threw " + std::string(e.kind_name()) + ": " +
                        e.what();
    }
  }
  cr.expect(failures == 0,
            std::to_string(failures) + "/50 instances failed; first: " +
                first_failure);
  double dt = now_seconds() - t0;
  cr.expect(dt <= 60.0, "runtime " + std::to_string(dt) + " s <= 60 s");
}

TEST_CASE("criterion 7: randomized invariant suites") {
  Criterion cr("7 invariant suites, >= 200 cases each");
  std::mt19937_64 rng(202);

  // orthonormality + nested spans of gram_schmidt
  {
    std::uniform_real_distribution<double> u(-3, 3);
    int done = 0;
    bool ok = true;
    while (done < 200) {
      int n = 2 + static_cast<int>(rng() % 5);
      Mat m(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = u(rng);
      if (std::abs(det(m)) < 1e-2) continue;
      std::vector<Vec> cols;
      for (int j = 0; j < n; ++j) cols.push_back(m.col(j));
      Mat q = gram_schmidt(cols);
      ok = ok && (q.transpose() * q - Mat::identity(n)).max_abs() <= 1e-12;
      ++done;
    }
    cr.expect(ok, "gram_schmidt orthonormality (200 cases)");
  }

  // pivoted rank against the exhaustive minor oracle
  {
    bool ok = true;
    for (int t = 0; t < 200; ++t) {
      int n = 2 + static_cast<int>(rng() % 3);
      Mat m(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          m(i, j) = static_cast<double>(static_cast<int>(rng() % 7)) - 3.0;
      // oracle: rank = n minus the dimension of the null space, probed by
      // elimination on an exact integer copy at tolerance zero; use the
      // determinant-of-submatrices definition
      int oracle = 0;
      for (int r = 1; r <= n; ++r) {
        bool found = false;
        std::vector<int> ri(r), ci(r);
        std::function<void(int, int)> rows_ = [&](int pos, int start) {
          if (found) return;
          if (pos == r) {
            std::function<void(int, int)> cols_ = [&](int cpos, int cstart) {
              if (found) return;
              if (cpos == r) {
                Mat sub(r, r);
                for (int i = 0; i < r; ++i)
                  for (int j = 0; j < r; ++j) sub(i, j) = m(ri[i], ci[j]);
                // integer entries: cofactor determinant is exact
                std::function<double(const Mat&)> dd = [&](const Mat& mm)
                    -> double {
                  if (mm.rows() == 1) return mm(0, 0);
                  double s2 = 0;
                  for (int j = 0; j < mm.cols(); ++j) {
                    Mat minor(mm.rows() - 1, mm.cols() - 1);
                    for (int i2 = 1; i2 < mm.rows(); ++i2) {
                      int jj = 0;
                      for (int k = 0; k < mm.cols(); ++k) {
                        if (k == j) continue;
                        minor(i2 - 1, jj++) = mm(i2, k);
                      }
                    }
                    s2 += (j % 2 ? -1 : 1) * mm(0, j) * dd(minor);
                  }
                  return s2;
                };
                if (std::abs(dd(sub)) > 0.5) found = true;
                return;
              }
              for (int c2 = cstart; c2 < n; ++c2) {
                ci[cpos] = c2;
                cols_(cpos + 1, c2 + 1);
              }
            };
            cols_(0, 0);
            return;
          }
          for (int r2 = start; r2 < n; ++r2) {
            ri[pos] = r2;
            rows_(pos + 1, r2 + 1);
          }
        };
        rows_(0, 0);
        if (found)
          oracle = r;
        else
          break;
      }
      ok = ok && rank(m) == oracle;
    }
    cr.expect(ok, "rank equals minor-scan oracle (200 cases)");
  }

  // characteristic polynomial against direct determinants
  {
    std::uniform_real_distribution<double> ux(1, 2), ul(-3, 3);
    bool ok = true;
    Pencil p1 = fixtures::ex1_pencil(), p2 = fixtures::ex2_pencil();
    for (int t = 0; t < 200; ++t) {
      const Pencil& p = t % 2 ? p1 : p2;
      std::vector<double> x{ux(rng), ux(rng)};
      double lam = ul(rng);
      RealPoly cp = char_poly_at(p, x);
      double direct = det(p.a.eval(x) + lam * p.b.eval(x));
      ok = ok && std::abs(cp.eval(lam) - direct) <= 1e-8 * (1 + std::abs(direct));
    }
    cr.expect(ok, "char-poly cross-check (200 cases)");
  }

  // epsilon = 1 factorization of the shifted pencil spectrum
  {
    bool ok = true;
    int cases = 0;
    for (const Pencil& p :
         {fixtures::ex1_pencil(11), fixtures::ex2_pencil(11)}) {
      SpectrumProfile sp = spectrum_profile(p);
      ShiftFunction shift = choose_shift(sp, p);
      Grid g = p.grid();
      for (int flat = 0; flat < g.total(); ++flat) {
        Point x = g.point(flat);
        double cc = shift.at(flat);
        Mat gm = solve(p.a.eval(x) + cc * p.b.eval(x), p.b.eval(x));
        RealPoly cp = char_poly(gm);
        std::vector<std::pair<double, int>> roots;
        roots.emplace_back(0.0, sp.lhat);
        roots.emplace_back(1.0 / cc, sp.l);
        for (const auto& br : sp.branches)
          roots.emplace_back(1.0 / (cc - br.values[flat]), br.multiplicity);
        RealPoly pred = RealPoly::from_roots(1.0, roots);
        for (int i = 0; i <= cp.degree(); ++i)
          ok = ok && std::abs(cp[i] - pred[i]) <= 1e-6 * (1 + std::abs(pred[i]));
        ++cases;
      }
    }
    cr.expect(ok && cases >= 200,
              "epsilon-1 factorization (" + std::to_string(cases) +
                  " grid-point cases)");
  }
}
