#include "pencil/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "pencil/canonize.hpp"
#include "pencil/errors.hpp"
#include "pencil/generate.hpp"
#include "pencil/io.hpp"
#include "pencil/spectrum.hpp"
#include "pencil/verify.hpp"

namespace pencil {

namespace {

using ordered_json = nlohmann::ordered_json;

// exit codes: 0 pass, 1 input error, 2 hypothesis violation,
// 3 conditioning failure, 4 verification failure
int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SyntaxError:
    case ErrorKind::UnknownFunction:
    case ErrorKind::VariableOutOfRange:
    case ErrorKind::EvalFault:
    case ErrorKind::InputError:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::SpecViolation:
    case ErrorKind::NonSquare:
    case ErrorKind::BranchSeparation:
      return 1;
    case ErrorKind::ConditioningBlowup:
      return 3;
    default:
      return 2;
  }
}

ordered_json error_json(const Error& e) {
  ordered_json j;
  j["kind"] = e.kind_name();
  j["message"] = e.what();
  if (!e.points().empty()) j["points"] = e.points();
  return j;
}

ordered_json tolerances_json(const Tolerances& t, int n) {
  ordered_json j;
  j["rank_rel"] = t.rank_rel > 0 ? t.rank_rel : default_rank_tol(n);
  j["snap_rel"] = t.snap_rel;
  j["cluster_tol"] = t.cluster_tol;
  j["imag_tol"] = t.imag_tol;
  j["separation_tol"] = t.separation_tol;
  j["regularity_rel"] = t.regularity_rel;
  j["canon_rel"] = t.canon_rel;
  j["eig_tol"] = t.eig_tol;
  j["cond_limit"] = t.cond_limit;
  j["spectral_gap_tol"] = t.spectral_gap_tol;
  return j;
}

ordered_json report_head(const char* command) {
  ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = command;
  return j;
}

ordered_json mat_json(const Mat& m) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < m.rows(); ++i) {
    ordered_json r = ordered_json::array();
    for (int j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

Mat mat_from_json(const ordered_json& rows) {
  int r = static_cast<int>(rows.size());
  int c = r ? static_cast<int>(rows[0].size()) : 0;
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
  return m;
}

ordered_json mat_field_json(const std::vector<Mat>& field) {
  ordered_json arr = ordered_json::array();
  for (const Mat& m : field) arr.push_back(mat_json(m));
  return arr;
}

std::vector<Mat> mat_field_from_json(const ordered_json& arr) {
  std::vector<Mat> field;
  for (const auto& m : arr) field.push_back(mat_from_json(m));
  return field;
}

ordered_json pencil_json(const Pencil& p) {
  ordered_json j;
  j["n"] = p.order();
  j["m"] = p.vars();
  ordered_json dom = ordered_json::array();
  for (int i = 0; i < p.vars(); ++i)
    dom.push_back({p.domain.lo[i], p.domain.hi[i]});
  j["domain"] = dom;
  j["grid"] = p.grid_counts;
  return j;
}

ordered_json spectrum_json(const SpectrumProfile& sp) {
  ordered_json j;
  j["l"] = sp.l;
  j["d"] = sp.d;
  j["lhat"] = sp.lhat;
  ordered_json branches = ordered_json::array();
  for (const auto& br : sp.branches) {
    ordered_json b;
    b["multiplicity"] = br.multiplicity;
    double mn = br.values[0], mx = br.values[0];
    for (double v : br.values) { mn = std::min(mn, v); mx = std::max(mx, v); }
    b["min"] = mn;
    b["max"] = mx;
    b["values"] = br.values;
    branches.push_back(b);
  }
  j["branches"] = branches;
  return j;
}

ordered_json shift_json(const ShiftFunction& sf) {
  ordered_json j;
  j["constant"] = sf.constant;
  if (sf.constant)
    j["value"] = sf.value;
  else
    j["values"] = sf.values;
  return j;
}

ordered_json rank_degree_json(const RankDegreeClassification& rd) {
  ordered_json j;
  j["criterion"] = rd.criterion();
  j["rank_b_matches_lambda_degree"] = rd.rank_b_matches_lambda_degree;
  j["rank_a_matches_mu_degree"] = rd.rank_a_matches_mu_degree;
  j["lambda_degree"] = rd.lambda_degree;
  j["mu_degree"] = rd.mu_degree;
  j["remark2_simple"] = rd.remark2_simple;
  return j;
}

void emit(const ordered_json& j, const CommandOptions& opt,
          std::ostream& out) {
  std::string text = j.dump(2) + "\n";
  out << text;
  if (!opt.out.empty()) write_text_file(opt.out, text);
}

PencilFile load_pencil(const std::string& path, const CommandOptions& opt) {
  PencilFile pf = read_pencil_file(path);
  if (opt.grid)
    pf.pencil.grid_counts.assign(pf.pencil.vars(), *opt.grid);
  if (opt.shift) pf.shift = *opt.shift;
  if (opt.tol_rank) pf.tol.rank_rel = *opt.tol_rank;
  if (opt.tol_canon) pf.tol.canon_rel = *opt.tol_canon;
  pf.pencil.validate();
  return pf;
}

struct AnalysisBundle {
  SpectrumProfile spectrum;
  RankProfile ranks;
  RankDegreeClassification rank_degree;
  ShiftFunction shift;
};

AnalysisBundle analyze_pencil(const PencilFile& pf) {
  AnalysisBundle ab;
  ab.spectrum = spectrum_profile(pf.pencil, pf.tol);
  ab.ranks = rank_profile(pf.pencil, pf.tol);
  ab.rank_degree = rank_degree_classify(pf.pencil, ab.spectrum, pf.tol);
  ab.shift = choose_shift(ab.spectrum, pf.pencil, pf.tol, pf.shift);
  return ab;
}

}  // namespace

int run_analyze(const std::string& pencil_path, const CommandOptions& opt,
                std::ostream& report_out) {
  ordered_json rep = report_head("analyze");
  rep["input"] = pencil_path;
  PencilFile pf;
  try {
    pf = load_pencil(pencil_path, opt);
  } catch (const Error& e) {
    rep["status"] = "input-error";
    rep["error"] = error_json(e);
    emit(rep, opt, report_out);
    return 1;
  }
  rep["pencil"] = pencil_json(pf.pencil);
  rep["tolerances"] = tolerances_json(pf.tol, pf.pencil.order());
  try {
    AnalysisBundle ab = analyze_pencil(pf);
    rep["status"] = "pass";
    rep["spectrum"] = spectrum_json(ab.spectrum);
    rep["rank"] = {{"rank_a", ab.ranks.rank_a}, {"rank_b", ab.ranks.rank_b}};
    rep["rank_degree"] = rank_degree_json(ab.rank_degree);
    rep["shift"] = shift_json(ab.shift);
    rep["warnings"] = ab.spectrum.warnings;
    emit(rep, opt, report_out);
    return 0;
  } catch (const Error& e) {
    int code = exit_code_for(e.kind());
    rep["status"] = code == 1 ? "input-error" : "hypothesis-violation";
    rep["error"] = error_json(e);
    emit(rep, opt, report_out);
    return code;
  }
}

int run_canonize(const std::string& pencil_path, const CommandOptions& opt,
                 std::ostream& report_out) {
  ordered_json rep = report_head("canonize");
  rep["input"] = pencil_path;
  PencilFile pf;
  try {
    pf = load_pencil(pencil_path, opt);
  } catch (const Error& e) {
    rep["status"] = "input-error";
    rep["error"] = error_json(e);
    emit(rep, opt, report_out);
    return 1;
  }
  rep["pencil"] = pencil_json(pf.pencil);
  rep["tolerances"] = tolerances_json(pf.tol, pf.pencil.order());
  try {
    AnalysisBundle ab = analyze_pencil(pf);
    rep["spectrum"] = spectrum_json(ab.spectrum);
    rep["rank"] = {{"rank_a", ab.ranks.rank_a}, {"rank_b", ab.ranks.rank_b}};
    rep["rank_degree"] = rank_degree_json(ab.rank_degree);
    rep["shift"] = shift_json(ab.shift);

    CanonizeResult cr = canonize(pf.pencil, ab.spectrum, ab.shift, pf.tol);

    ordered_json canon;
    canon["d"] = cr.form.d;
    canon["l"] = cr.form.l;
    canon["lhat"] = cr.form.lhat;
    canon["mults"] = cr.form.mults;
    ordered_json jb = ordered_json::array();
    for (const auto& branch_blocks : cr.form.j_blocks)
      jb.push_back(mat_field_json(branch_blocks));
    canon["j_blocks"] = jb;
    canon["m_block"] = mat_field_json(cr.form.m_block);
    canon["n_block"] = mat_field_json(cr.form.n_block);
    rep["canonical"] = canon;

    rep["transforms"] = {{"P", mat_field_json(cr.pair.p)},
                         {"Q", mat_field_json(cr.pair.q)}};
    double max_ra = 0, max_rb = 0, max_cp = 0, max_cq = 0;
    for (size_t i = 0; i < cr.pair.residual_a.size(); ++i) {
      max_ra = std::max(max_ra, cr.pair.residual_a[i]);
      max_rb = std::max(max_rb, cr.pair.residual_b[i]);
      max_cp = std::max(max_cp, cr.pair.cond_p[i]);
      max_cq = std::max(max_cq, cr.pair.cond_q[i]);
    }
    rep["residuals"] = {{"max_a", max_ra},
                        {"max_b", max_rb},
                        {"per_point_a", cr.pair.residual_a},
                        {"per_point_b", cr.pair.residual_b}};
    rep["condition_numbers"] = {{"max_p", max_cp},
                                {"max_q", max_cq},
                                {"per_point_p", cr.pair.cond_p},
                                {"per_point_q", cr.pair.cond_q}};
    rep["determinants"] = {{"P", cr.pair.det_p}, {"Q", cr.pair.det_q}};
    rep["warnings"] = cr.warnings;

    if (!opt.truth.empty()) {
      GeneratedInstance truth = read_truth_sidecar(opt.truth, pf.pencil);
      std::vector<int> want = truth.spec.mults, got = cr.form.mults;
      std::sort(want.begin(), want.end());
      std::sort(got.begin(), got.end());
      bool structure_ok = truth.spec.d == cr.form.d &&
                          truth.spec.l == cr.form.l &&
                          truth.spec.lhat == cr.form.lhat && want == got;
      double branch_err = 0;
      if (structure_ok && !truth.spec.branch_exprs.empty()) {
        Grid g = pf.pencil.grid();
        std::vector<ExprPtr> bex;
        for (const auto& s : truth.spec.branch_exprs)
          bex.push_back(parse_expr(s, pf.pencil.vars()));
        for (int flat = 0; flat < g.total(); ++flat) {
          Point x = g.point(flat);
          // match each true branch to the closest recovered branch
          for (const auto& e : bex) {
            double want_v = e->eval(x);
            double best = std::numeric_limits<double>::infinity();
            for (const auto& br : ab.spectrum.branches)
              best = std::min(best, std::abs(br.values[flat] - want_v));
            branch_err = std::max(branch_err, best);
          }
        }
      }
      rep["structure_match"] = {{"structure", structure_ok},
                                {"max_branch_error", branch_err},
                                {"pass", structure_ok && branch_err <= 1e-6}};
    }

    rep["status"] = "pass";
    emit(rep, opt, report_out);
    return 0;
  } catch (const Error& e) {
    int code = exit_code_for(e.kind());
    rep["status"] = code == 1   ? "input-error"
                    : code == 3 ? "conditioning-failure"
                                : "hypothesis-violation";
    rep["error"] = error_json(e);
    emit(rep, opt, report_out);
    return code;
  }
}

namespace {

ordered_json verification_json(const VerificationReport& vr) {
  ordered_json j;
  j["pass"] = vr.pass;
  j["tolerance"] = vr.tolerance;
  j["max_residual_a"] = vr.max_residual_a;
  j["max_residual_b"] = vr.max_residual_b;
  j["residual_a"] = vr.residual_a;
  j["residual_b"] = vr.residual_b;
  j["min_abs_det_p"] = vr.min_abs_det_p;
  j["min_abs_det_q"] = vr.min_abs_det_q;
  j["det_floor"] = vr.det_floor;
  if (vr.nilp_index_m) j["nilpotency_index_m"] = *vr.nilp_index_m;
  if (vr.nilp_index_n) j["nilpotency_index_n"] = *vr.nilp_index_n;
  auto cont = [](const ContinuityDiagnostics& c) {
    ordered_json cj;
    cj["max_jump"] = c.max_jump;
    cj["median_jump"] = c.median_jump;
    cj["ratio"] = c.ratio;
    cj["flagged"] = c.flagged;
    return cj;
  };
  j["continuity_p"] = cont(vr.continuity_p);
  j["continuity_q"] = cont(vr.continuity_q);
  j["notes"] = vr.notes;
  return j;
}

bool looks_like_json(const std::string& text) {
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '{';
  }
  return false;
}

}  // namespace

int run_verify(const std::string& pencil_path,
               const std::string& transforms_path, const CommandOptions& opt,
               std::ostream& report_out) {
  ordered_json rep = report_head("verify");
  rep["input"] = pencil_path;
  rep["transforms"] = transforms_path;
  PencilFile pf;
  try {
    pf = load_pencil(pencil_path, opt);
  } catch (const Error& e) {
    rep["status"] = "input-error";
    rep["error"] = error_json(e);
    emit(rep, opt, report_out);
    return 1;
  }
  rep["pencil"] = pencil_json(pf.pencil);
  rep["tolerances"] = tolerances_json(pf.tol, pf.pencil.order());
  try {
    VerificationReport vr;
    std::string text = read_text_file(transforms_path);
    if (looks_like_json(text)) {
      // sampled transforms from a canonize report
      ordered_json cj;
      try {
        cj = ordered_json::parse(text);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InputError,
                    transforms_path + ": bad JSON: " + e.what());
      }
      if (!cj.contains("transforms") || !cj.contains("canonical"))
        throw Error(ErrorKind::InputError,
                    transforms_path +
                        ": JSON lacks transforms/canonical sections");
      EquivalencePair pair;
      pair.p = mat_field_from_json(cj["transforms"]["P"]);
      pair.q = mat_field_from_json(cj["transforms"]["Q"]);
      CanonicalForm form;
      form.n = pf.pencil.order();
      form.d = cj["canonical"]["d"].get<int>();
      form.l = cj["canonical"]["l"].get<int>();
      form.lhat = cj["canonical"]["lhat"].get<int>();
      form.mults = cj["canonical"]["mults"].get<std::vector<int>>();
      for (const auto& bb : cj["canonical"]["j_blocks"])
        form.j_blocks.push_back(mat_field_from_json(bb));
      form.m_block = mat_field_from_json(cj["canonical"]["m_block"]);
      form.n_block = mat_field_from_json(cj["canonical"]["n_block"]);
      if (static_cast<int>(pair.p.size()) != pf.pencil.grid().total())
        throw Error(ErrorKind::DimensionMismatch,
                    "sampled transforms cover " +
                        std::to_string(pair.p.size()) +
                        " points, grid has " +
                        std::to_string(pf.pencil.grid().total()));
      vr = verify_equivalence(pf.pencil, pair, form, pf.tol);
    } else {
      TransformsFile tf =
          read_transforms_file(transforms_path, pf.pencil.vars());
      if (!tf.target)
        throw Error(ErrorKind::InputError,
                    transforms_path +
                        ": expression transforms need targetA/targetB");
      vr = verify_equivalence(pf.pencil, tf.p, tf.q, tf.target->first,
                              tf.target->second, pf.tol);
    }
    rep["report"] = verification_json(vr);
    rep["status"] = vr.pass ? "pass" : "verification-failure";
    emit(rep, opt, report_out);
    return vr.pass ? 0 : 4;
  } catch (const Error& e) {
    int code = exit_code_for(e.kind());
    rep["status"] = code == 1 ? "input-error" : "hypothesis-violation";
    rep["error"] = error_json(e);
    emit(rep, opt, report_out);
    return code;
  }
}

int run_gen(const std::string& structure_path, const CommandOptions& opt,
            std::ostream& report_out) {
  ordered_json rep = report_head("gen");
  rep["input"] = structure_path;
  try {
    StructureFile sf = read_structure_file(structure_path);
    if (opt.seed != 0) sf.spec.seed = opt.seed;
    if (opt.grid) sf.grid_counts.assign(sf.spec.m, *opt.grid);
    GeneratedInstance inst = generate(sf.spec, sf.domain, sf.grid_counts);
    std::string pencil_path =
        opt.out.empty() ? "generated.pencil" : opt.out;
    std::string truth_path = pencil_path + ".truth.json";
    write_pencil_file(pencil_path, inst.pencil);
    write_text_file(truth_path, truth_sidecar_json(inst));
    rep["status"] = "pass";
    rep["outputs"] = {{"pencil", pencil_path}, {"truth", truth_path}};
    rep["structure"] = {{"n", inst.spec.n},       {"m", inst.spec.m},
                        {"d", inst.spec.d},       {"l", inst.spec.l},
                        {"lhat", inst.spec.lhat}, {"mults", inst.spec.mults},
                        {"seed", inst.spec.seed}};
    report_out << rep.dump(2) << "\n";
    return 0;
  } catch (const Error& e) {
    rep["status"] = "input-error";
    rep["error"] = error_json(e);
    report_out << rep.dump(2) << "\n";
    return 1;
  }
}

}  // namespace pencil
