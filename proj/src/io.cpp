#include "pencil/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pencil/errors.hpp"

namespace pencil {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& origin, int line,
                      const std::string& what) {
  throw Error(ErrorKind::InputError,
              origin + ":" + std::to_string(line) + ": " + what);
}

// Whitespace-separated tokens; double quotes group one token and may
// contain spaces.  '#' starts a comment outside quotes.
std::vector<std::string> tokenize(const std::string& line,
                                  const std::string& origin, int lineno) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
    if (c == '#') break;
    if (c == '"') {
      size_t j = line.find('"', i + 1);
      if (j == std::string::npos) bad(origin, lineno, "unterminated quote");
      out.push_back(line.substr(i + 1, j - i - 1));
      i = j + 1;
    } else {
      size_t j = i;
      while (j < line.size() &&
             !std::isspace(static_cast<unsigned char>(line[j])) &&
             line[j] != '#')
        ++j;
      out.push_back(line.substr(i, j - i));
      i = j;
    }
  }
  return out;
}

double to_double(const std::string& s, const std::string& origin, int line) {
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    bad(origin, line, "expected a number, got '" + s + "'");
  }
}

int to_int(const std::string& s, const std::string& origin, int line) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    bad(origin, line, "expected an integer, got '" + s + "'");
  return v;
}

struct LineReader {
  std::vector<std::pair<int, std::vector<std::string>>> lines;
  size_t pos = 0;
  std::string origin;

  bool done() const { return pos >= lines.size(); }
  const std::vector<std::string>& peek() const { return lines[pos].second; }
  int lineno() const {
    return pos < lines.size() ? lines[pos].first : -1;
  }
  void next() { ++pos; }
};

LineReader read_lines(const std::string& text, const std::string& origin) {
  LineReader r;
  r.origin = origin;
  std::istringstream is(text);
  std::string line;
  int no = 0;
  while (std::getline(is, line)) {
    ++no;
    auto toks = tokenize(line, origin, no);
    if (!toks.empty()) r.lines.emplace_back(no, std::move(toks));
  }
  return r;
}

std::vector<std::vector<std::string>> read_matrix_section(LineReader& r,
                                                          int n) {
  std::vector<std::vector<std::string>> rows;
  while (!r.done()) {
    const auto& t = r.peek();
    if (t.size() == 1 && t[0] == "end") {
      r.next();
      if (n > 0 && static_cast<int>(rows.size()) != n)
        bad(r.origin, r.lineno(), "matrix section has " +
                                      std::to_string(rows.size()) +
                                      " rows, want " + std::to_string(n));
      return rows;
    }
    rows.push_back(t);
    r.next();
  }
  bad(r.origin, -1, "matrix section not closed with 'end'");
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::InputError, "cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  // write-then-rename keeps partially written files out of readers' view
  std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw Error(ErrorKind::InputError, "cannot write " + tmp);
    f << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw Error(ErrorKind::InputError, "cannot move " + tmp + " to " + path);
}

PencilFile parse_pencil_text(const std::string& text,
                             const std::string& origin) {
  LineReader r = read_lines(text, origin);
  if (r.done() || r.peek().size() != 2 || r.peek()[0] != "format" ||
      r.peek()[1] != "pencil-v1")
    bad(origin, r.lineno(), "expected 'format pencil-v1' header");
  r.next();

  PencilFile pf;
  int n = -1, m = -1;
  std::vector<double> domain;
  std::vector<int> grid;
  std::vector<std::vector<std::string>> a_rows, b_rows;
  while (!r.done()) {
    auto t = r.peek();
    int ln = r.lineno();
    r.next();
    if (t[0] == "n" && t.size() == 2) {
      n = to_int(t[1], origin, ln);
    } else if (t[0] == "m" && t.size() == 2) {
      m = to_int(t[1], origin, ln);
    } else if (t[0] == "domain") {
      for (size_t i = 1; i < t.size(); ++i)
        domain.push_back(to_double(t[i], origin, ln));
    } else if (t[0] == "grid") {
      for (size_t i = 1; i < t.size(); ++i)
        grid.push_back(to_int(t[i], origin, ln));
    } else if (t[0] == "begin" && t.size() == 2 && t[1] == "A") {
      a_rows = read_matrix_section(r, n);
    } else if (t[0] == "begin" && t.size() == 2 && t[1] == "B") {
      b_rows = read_matrix_section(r, n);
    } else if (t[0] == "shift" && t.size() == 2) {
      pf.shift = to_double(t[1], origin, ln);
    } else if (t[0] == "tol" && t.size() == 3) {
      double v = to_double(t[2], origin, ln);
      if (t[1] == "rank") pf.tol.rank_rel = v;
      else if (t[1] == "canon") pf.tol.canon_rel = v;
      else if (t[1] == "cluster") pf.tol.cluster_tol = v;
      else if (t[1] == "separation") pf.tol.separation_tol = v;
      else if (t[1] == "regularity") pf.tol.regularity_rel = v;
      else bad(origin, ln, "unknown tolerance '" + t[1] + "'");
    } else {
      bad(origin, ln, "unrecognized directive '" + t[0] + "'");
    }
  }
  if (n < 1 || m < 1) bad(origin, -1, "missing n or m");
  if (static_cast<int>(domain.size()) != 2 * m)
    bad(origin, -1, "domain needs 2*m bounds");
  if (static_cast<int>(grid.size()) != m) bad(origin, -1, "grid needs m counts");
  if (a_rows.empty() || b_rows.empty()) bad(origin, -1, "missing A or B");

  Box box;
  for (int i = 0; i < m; ++i) {
    box.lo.push_back(domain[2 * i]);
    box.hi.push_back(domain[2 * i + 1]);
  }
  pf.pencil.a = MatrixFunction::from_strings(a_rows, m);
  pf.pencil.b = MatrixFunction::from_strings(b_rows, m);
  pf.pencil.domain = box;
  pf.pencil.grid_counts = grid;
  if (pf.pencil.a.order() != n)
    bad(origin, -1, "A has " + std::to_string(pf.pencil.a.order()) +
                        " rows, header says n = " + std::to_string(n));
  pf.pencil.validate();
  return pf;
}

PencilFile read_pencil_file(const std::string& path) {
  return parse_pencil_text(read_text_file(path), path);
}

std::string pencil_to_text(const Pencil& p) {
  std::ostringstream os;
  os.precision(17);
  os << "format pencil-v1\n";
  os << "n " << p.order() << "\n";
  os << "m " << p.vars() << "\n";
  os << "domain";
  for (int i = 0; i < p.vars(); ++i)
    os << " " << p.domain.lo[i] << " " << p.domain.hi[i];
  os << "\ngrid";
  for (int c : p.grid_counts) os << " " << c;
  os << "\n";
  for (int which = 0; which < 2; ++which) {
    const MatrixFunction& f = which == 0 ? p.a : p.b;
    os << "begin " << (which == 0 ? "A" : "B") << "\n";
    for (const auto& row : f.to_strings()) {
      for (size_t j = 0; j < row.size(); ++j)
        os << (j ? " " : "") << '"' << row[j] << '"';
      os << "\n";
    }
    os << "end\n";
  }
  return os.str();
}

void write_pencil_file(const std::string& path, const Pencil& p) {
  write_text_file(path, pencil_to_text(p));
}

TransformsFile read_transforms_file(const std::string& path, int var_count) {
  LineReader r = read_lines(read_text_file(path), path);
  if (r.done() || r.peek().size() != 2 || r.peek()[0] != "format" ||
      r.peek()[1] != "transforms-v1")
    bad(path, r.lineno(), "expected 'format transforms-v1' header");
  r.next();
  std::vector<std::vector<std::string>> p_rows, q_rows, ta_rows, tb_rows;
  while (!r.done()) {
    auto t = r.peek();
    int ln = r.lineno();
    r.next();
    if (t.size() == 2 && t[0] == "begin") {
      if (t[1] == "P") p_rows = read_matrix_section(r, -1);
      else if (t[1] == "Q") q_rows = read_matrix_section(r, -1);
      else if (t[1] == "targetA") ta_rows = read_matrix_section(r, -1);
      else if (t[1] == "targetB") tb_rows = read_matrix_section(r, -1);
      else bad(path, ln, "unknown section '" + t[1] + "'");
    } else {
      bad(path, ln, "unrecognized directive '" + t[0] + "'");
    }
  }
  if (p_rows.empty() || q_rows.empty())
    bad(path, -1, "transforms file needs P and Q sections");
  TransformsFile tf;
  tf.p = MatrixFunction::from_strings(p_rows, var_count);
  tf.q = MatrixFunction::from_strings(q_rows, var_count);
  if (!ta_rows.empty() != !tb_rows.empty())
    bad(path, -1, "targetA and targetB must both be present or both absent");
  if (!ta_rows.empty())
    tf.target = {MatrixFunction::from_strings(ta_rows, var_count),
                 MatrixFunction::from_strings(tb_rows, var_count)};
  return tf;
}

StructureFile read_structure_file(const std::string& path) {
  LineReader r = read_lines(read_text_file(path), path);
  if (r.done() || r.peek().size() != 2 || r.peek()[0] != "format" ||
      r.peek()[1] != "structure-v1")
    bad(path, r.lineno(), "expected 'format structure-v1' header");
  r.next();
  StructureFile sf;
  std::vector<double> domain;
  std::vector<std::vector<std::string>> m_rows, n_rows;
  while (!r.done()) {
    auto t = r.peek();
    int ln = r.lineno();
    r.next();
    if (t[0] == "n" && t.size() == 2) sf.spec.n = to_int(t[1], path, ln);
    else if (t[0] == "m" && t.size() == 2) sf.spec.m = to_int(t[1], path, ln);
    else if (t[0] == "d" && t.size() == 2) sf.spec.d = to_int(t[1], path, ln);
    else if (t[0] == "l" && t.size() == 2) sf.spec.l = to_int(t[1], path, ln);
    else if (t[0] == "lhat" && t.size() == 2)
      sf.spec.lhat = to_int(t[1], path, ln);
    else if (t[0] == "seed" && t.size() == 2)
      sf.spec.seed = static_cast<std::uint64_t>(to_int(t[1], path, ln));
    else if (t[0] == "domain")
      for (size_t i = 1; i < t.size(); ++i)
        domain.push_back(to_double(t[i], path, ln));
    else if (t[0] == "grid")
      for (size_t i = 1; i < t.size(); ++i)
        sf.grid_counts.push_back(to_int(t[i], path, ln));
    else if (t[0] == "branch" && t.size() == 3) {
      sf.spec.branch_exprs.push_back(t[1]);
      sf.spec.mults.push_back(to_int(t[2], path, ln));
    } else if (t[0] == "begin" && t.size() == 2 &&
               (t[1] == "M" || t[1] == "N")) {
      auto rows = read_matrix_section(r, -1);
      Mat pat(static_cast<int>(rows.size()), static_cast<int>(rows.size()));
      for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size())
          bad(path, ln, "pattern must be square");
        for (size_t j = 0; j < rows[i].size(); ++j)
          pat(static_cast<int>(i), static_cast<int>(j)) =
              to_double(rows[i][j], path, ln);
      }
      (t[1] == "M" ? m_rows : n_rows) = rows;
      if (t[1] == "M") sf.spec.m_pattern = pat;
      else sf.spec.n_pattern = pat;
    } else {
      bad(path, ln, "unrecognized directive '" + t[0] + "'");
    }
  }
  if (sf.spec.m < 1) bad(path, -1, "missing m");
  if (static_cast<int>(domain.size()) != 2 * sf.spec.m)
    bad(path, -1, "domain needs 2*m bounds");
  for (int i = 0; i < sf.spec.m; ++i) {
    sf.domain.lo.push_back(domain[2 * i]);
    sf.domain.hi.push_back(domain[2 * i + 1]);
  }
  if (sf.grid_counts.empty()) sf.grid_counts.assign(sf.spec.m, 5);
  return sf;
}

namespace {

ordered_json matrix_strings_json(const MatrixFunction& f) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : f.to_strings()) {
    ordered_json r = ordered_json::array();
    for (const auto& e : row) r.push_back(e);
    rows.push_back(r);
  }
  return rows;
}

MatrixFunction matrix_from_json(const ordered_json& rows, int var_count) {
  std::vector<std::vector<std::string>> entries;
  for (const auto& row : rows) {
    std::vector<std::string> r;
    for (const auto& e : row) r.push_back(e.get<std::string>());
    entries.push_back(std::move(r));
  }
  return MatrixFunction::from_strings(entries, var_count);
}

}  // namespace

std::string truth_sidecar_json(const GeneratedInstance& inst) {
  ordered_json j;
  j["schema_version"] = 1;
  j["kind"] = "pencil-ground-truth";
  j["structure"] = {{"n", inst.spec.n},     {"m", inst.spec.m},
                    {"d", inst.spec.d},     {"l", inst.spec.l},
                    {"lhat", inst.spec.lhat}, {"mults", inst.spec.mults}};
  j["branches"] = inst.spec.branch_exprs;
  j["seed"] = inst.spec.seed;
  j["canonical"] = {{"A", matrix_strings_json(inst.canon_a)},
                    {"B", matrix_strings_json(inst.canon_b)}};
  j["witnesses"] = {{"P0", matrix_strings_json(inst.p0)},
                    {"Q0", matrix_strings_json(inst.q0)}};
  return j.dump(2) + "\n";
}

GeneratedInstance read_truth_sidecar(const std::string& path,
                                     const Pencil& pencil) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InputError,
                path + ": bad ground-truth JSON: " + e.what());
  }
  GeneratedInstance inst;
  try {
    const auto& s = j.at("structure");
    inst.spec.n = s.at("n").get<int>();
    inst.spec.m = s.at("m").get<int>();
    inst.spec.d = s.at("d").get<int>();
    inst.spec.l = s.at("l").get<int>();
    inst.spec.lhat = s.at("lhat").get<int>();
    inst.spec.mults = s.at("mults").get<std::vector<int>>();
    inst.spec.branch_exprs =
        j.at("branches").get<std::vector<std::string>>();
    inst.spec.seed = j.at("seed").get<std::uint64_t>();
    int m = inst.spec.m;
    inst.canon_a = matrix_from_json(j.at("canonical").at("A"), m);
    inst.canon_b = matrix_from_json(j.at("canonical").at("B"), m);
    inst.p0 = matrix_from_json(j.at("witnesses").at("P0"), m);
    inst.q0 = matrix_from_json(j.at("witnesses").at("Q0"), m);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InputError,
                path + ": ground-truth JSON missing fields: " + e.what());
  }
  inst.pencil = pencil;
  return inst;
}

}  // namespace pencil
