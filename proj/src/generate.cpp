#include "pencil/generate.hpp"

#include <cmath>
#include <random>
#include <string>

#include "pencil/errors.hpp"

namespace pencil {

namespace {

MatrixFunction mf_mul(const MatrixFunction& a, const MatrixFunction& b) {
  const int n = a.order();
  MatrixFunction c(n, a.var_count());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ExprPtr s = Expr::constant(0.0);
      for (int k = 0; k < n; ++k)
        s = expr_add(s, expr_mul(a.at(i, k), b.at(k, j)));
      c.set(i, j, s);
    }
  return c;
}

struct Factor {
  MatrixFunction fwd, inv;
};

// shear E + alpha e_i e_j^T; inverse is E - alpha e_i e_j^T
Factor shear(int n, int m, int i, int j, const ExprPtr& alpha) {
  Factor f{MatrixFunction::identity(n, m), MatrixFunction::identity(n, m)};
  f.fwd.set(i, j, alpha);
  f.inv.set(i, j, expr_neg(alpha));
  return f;
}

// diagonal scaling with entries bounded away from zero
Factor diagonal(int n, int m, const std::vector<ExprPtr>& entries) {
  Factor f{MatrixFunction::identity(n, m), MatrixFunction::identity(n, m)};
  for (int i = 0; i < n; ++i) {
    f.fwd.set(i, i, entries[i]);
    f.inv.set(i, i, expr_div(Expr::constant(1.0), entries[i]));
  }
  return f;
}

void check_strict_upper(const Mat& pat, int order, const char* which) {
  if (pat.rows() != order || pat.cols() != order)
    throw Error(ErrorKind::SpecViolation,
                std::string(which) + " pattern order mismatch");
  for (int i = 0; i < order; ++i)
    for (int j = 0; j <= i; ++j)
      if (pat(i, j) != 0.0)
        throw Error(ErrorKind::SpecViolation,
                    std::string(which) + " pattern must be strictly upper"
                                         " triangular");
}

}  // namespace

Mat superdiagonal_pattern(int order) {
  Mat p(order, order);
  for (int i = 0; i + 1 < order; ++i) p(i, i + 1) = 1.0;
  return p;
}

void StructureSpec::validate() const {
  if (n < 2 || m < 1)
    throw Error(ErrorKind::SpecViolation, "structure: need n >= 2, m >= 1");
  if (l < 1 || lhat < 1 || d < 0 || l + d + lhat != n)
    throw Error(ErrorKind::SpecViolation,
                "structure: need l >= 1, lhat >= 1, l + d + lhat = n");
  int sum = 0;
  for (int p : mults) {
    if (p < 1)
      throw Error(ErrorKind::SpecViolation, "structure: multiplicities >= 1");
    sum += p;
  }
  if (sum != d)
    throw Error(ErrorKind::SpecViolation,
                "structure: multiplicities sum to " + std::to_string(sum) +
                    ", want d = " + std::to_string(d));
  if (branch_exprs.size() != mults.size())
    throw Error(ErrorKind::SpecViolation,
                "structure: one branch expression per multiplicity required");
  if (m_pattern.rows() > 0) check_strict_upper(m_pattern, l, "M");
  if (n_pattern.rows() > 0) check_strict_upper(n_pattern, lhat, "N");
}

GeneratedInstance generate(const StructureSpec& spec, const Box& domain,
                           const std::vector<int>& grid_counts) {
  spec.validate();
  domain.validate();
  if (domain.dims() != spec.m)
    throw Error(ErrorKind::SpecViolation,
                "structure: domain dimension differs from m");
  const int n = spec.n, m = spec.m;
  const int k = static_cast<int>(spec.branch_exprs.size());
  Grid grid(domain, grid_counts);

  // branches: parse, then enforce nonzero / pairwise separated on the grid
  std::vector<ExprPtr> branches;
  for (const auto& s : spec.branch_exprs) branches.push_back(parse_expr(s, m));
  const double margin = 1e-4;
  for (int flat = 0; flat < grid.total(); ++flat) {
    Point x = grid.point(flat);
    std::vector<double> v(k);
    for (int i = 0; i < k; ++i) {
      v[i] = branches[i]->eval(x);
      if (std::abs(v[i]) <= margin * (1 + std::abs(v[i])))
        throw Error(ErrorKind::BranchSeparation,
                    "branch " + std::to_string(i + 1) +
                        " vanishes on the grid");
    }
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j)
        if (std::abs(v[i] - v[j]) <= margin * (1 + std::abs(v[i])))
          throw Error(ErrorKind::BranchSeparation,
                      "branches " + std::to_string(i + 1) + " and " +
                          std::to_string(j + 1) + " collide on the grid");
  }

  std::mt19937_64 rng(spec.seed);
  auto uni = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  auto pick_axis = [&]() {
    return 1 + static_cast<int>(rng() % static_cast<unsigned>(m));
  };

  Mat mpat = spec.m_pattern.rows() > 0 ? spec.m_pattern
                                       : superdiagonal_pattern(spec.l);
  Mat npat = spec.n_pattern.rows() > 0 ? spec.n_pattern
                                       : superdiagonal_pattern(spec.lhat);

  // canonical pair: Ac = diag{E_d, M, E_lhat}, Bc = diag{J(x), E_l, N}
  MatrixFunction ac(n, m), bc(n, m);
  for (int i = 0; i < spec.d; ++i) ac.set(i, i, Expr::constant(1.0));
  for (int i = 0; i < spec.l; ++i)
    for (int j = 0; j < spec.l; ++j)
      if (mpat(i, j) != 0.0)
        ac.set(spec.d + i, spec.d + j, Expr::constant(mpat(i, j)));
  for (int i = 0; i < spec.lhat; ++i)
    ac.set(spec.d + spec.l + i, spec.d + spec.l + i, Expr::constant(1.0));
  int pos = 0;
  for (int bi = 0; bi < k; ++bi) {
    int p = spec.mults[bi];
    ExprPtr diag = expr_div(Expr::constant(-1.0), branches[bi]);
    for (int i = 0; i < p; ++i) {
      bc.set(pos + i, pos + i, diag);
      if (i + 1 < p)
        bc.set(pos + i, pos + i + 1, Expr::constant(uni(0.3, 0.9)));
    }
    pos += p;
  }
  for (int i = 0; i < spec.l; ++i)
    bc.set(pos + i, pos + i, Expr::constant(1.0));
  pos += spec.l;
  for (int i = 0; i < spec.lhat; ++i)
    for (int j = 0; j < spec.lhat; ++j)
      if (npat(i, j) != 0.0)
        bc.set(pos + i, pos + j, Expr::constant(npat(i, j)));

  // witnesses: a few shears and a bounded diagonal, plus one smooth shear
  auto build_witness = [&](bool with_sin) {
    MatrixFunction fwd = MatrixFunction::identity(n, m);
    MatrixFunction inv = MatrixFunction::identity(n, m);
    std::vector<Factor> factors;
    std::vector<ExprPtr> diag_entries(n);
    for (int i = 0; i < n; ++i) {
      double mag = uni(0.8, 1.6);
      diag_entries[i] = Expr::constant(rng() % 2 ? mag : -mag);
    }
    factors.push_back(diagonal(n, m, diag_entries));
    int shears = 3;
    for (int s = 0; s < shears; ++s) {
      int i = static_cast<int>(rng() % static_cast<unsigned>(n));
      int j = static_cast<int>(rng() % static_cast<unsigned>(n));
      if (i == j) j = (j + 1) % n;
      ExprPtr alpha;
      if (with_sin && s == 0) {
        alpha = expr_mul(Expr::constant(uni(-0.5, 0.5)),
                         Expr::unary(UnaryOp::Sin, Expr::variable(pick_axis())));
      } else {
        alpha = Expr::constant(uni(-0.6, 0.6));
      }
      factors.push_back(shear(n, m, i, j, alpha));
    }
    for (const auto& f : factors) fwd = mf_mul(fwd, f.fwd);
    for (auto it = factors.rbegin(); it != factors.rend(); ++it)
      inv = mf_mul(inv, it->inv);
    return std::pair{fwd, inv};
  };

  auto [p0, p0inv] = build_witness(m >= 1);
  auto [q0, q0inv] = build_witness(m >= 2);

  GeneratedInstance inst;
  inst.spec = spec;
  inst.canon_a = ac;
  inst.canon_b = bc;
  inst.p0 = p0;
  inst.q0 = q0;
  inst.pencil.a = mf_mul(mf_mul(p0inv, ac), q0inv);
  inst.pencil.b = mf_mul(mf_mul(p0inv, bc), q0inv);
  inst.pencil.domain = domain;
  inst.pencil.grid_counts = grid_counts;
  inst.pencil.validate();
  return inst;
}

}  // namespace pencil
