#include "io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"

namespace matsl {
namespace io {

using nlohmann::json;

namespace {

// ---- canonical writer -------------------------------------------------

void put_num(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

void put_cx(std::string& out, cx v) {
  out += '[';
  put_num(out, v.real());
  out += ", ";
  put_num(out, v.imag());
  out += ']';
}

void put_mat(std::string& out, const Mat& a) {
  out += '[';
  for (int r = 0; r < a.rows(); ++r) {
    if (r) out += ", ";
    out += '[';
    for (int c = 0; c < a.cols(); ++c) {
      if (c) out += ", ";
      put_cx(out, a(r, c));
    }
    out += ']';
  }
  out += ']';
}

void put_grid(std::string& out, const std::vector<double>& g) {
  out += '[';
  for (size_t i = 0; i < g.size(); ++i) {
    if (i) out += ", ";
    put_num(out, g[i]);
  }
  out += ']';
}

void put_mat_list(std::string& out, const std::vector<Mat>& v) {
  out += '[';
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",\n  ";
    put_mat(out, v[i]);
  }
  out += ']';
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

// ---- checked readers ---------------------------------------------------

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  raise(ErrorCode::ParseError, path + ": " + what);
}

const json& field(const json& j, const std::string& path, const char* key) {
  if (!j.is_object()) bad(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(path + "." + key, "missing field");
  return *it;
}

double num_at(const json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

int int_at(const json& j, const std::string& path) {
  if (!j.is_number_integer()) bad(path, "expected an integer");
  return j.get<int>();
}

cx cx_at(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2)
    bad(path, "expected a complex value [re, im]");
  return cx(num_at(j[0], path + "[0]"), num_at(j[1], path + "[1]"));
}

Mat mat_at(const json& j, const std::string& path, int rows, int cols) {
  if (!j.is_array()) bad(path, "expected a matrix (array of rows)");
  if (static_cast<int>(j.size()) != rows)
    raise(ErrorCode::DimensionMismatch,
          path + ": has " + std::to_string(j.size()) + " rows, expected " +
              std::to_string(rows));
  Mat a(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const json& row = j[r];
    std::string rp = path + "[" + std::to_string(r) + "]";
    if (!row.is_array()) bad(rp, "expected a row array");
    if (static_cast<int>(row.size()) != cols)
      raise(ErrorCode::DimensionMismatch,
            rp + ": has " + std::to_string(row.size()) + " columns, expected " +
                std::to_string(cols));
    for (int c = 0; c < cols; ++c)
      a(r, c) = cx_at(row[c], rp + "[" + std::to_string(c) + "]");
  }
  return a;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    raise(ErrorCode::ParseError, e.what());
  }
}

void check_version(const json& j, const std::string& root) {
  const json& v = field(j, root, "version");
  if (!v.is_string()) bad(root + ".version", "expected a string");
  if (v.get<std::string>() != "1")
    raise(ErrorCode::UnsupportedVersion,
          root + ".version: unsupported version \"" + v.get<std::string>() +
              "\" (expected \"1\")");
}

}  // namespace

std::string write_problem(const BoundaryProblem& p) {
  std::string out = "{\n\"version\": \"1\",\n\"m\": ";
  out += std::to_string(p.m);
  out += ",\n\"grid\": ";
  put_grid(out, p.grid);
  out += ",\n\"Q\": ";
  put_mat_list(out, p.Q);
  out += ",\n\"h\": ";
  put_mat(out, p.h);
  out += ",\n\"H\": ";
  put_mat(out, p.H);
  out += ",\n\"selfadjoint_hint\": ";
  out += p.selfadjoint_hint ? "true" : "false";
  out += "\n}\n";
  return out;
}

BoundaryProblem read_problem(const std::string& text) {
  json j = parse(text);
  check_version(j, "problem");
  BoundaryProblem p;
  p.m = int_at(field(j, "problem", "m"), "problem.m");
  if (p.m < 1) bad("problem.m", "must be >= 1");
  const json& grid = field(j, "problem", "grid");
  if (!grid.is_array()) bad("problem.grid", "expected an array");
  for (size_t i = 0; i < grid.size(); ++i)
    p.grid.push_back(num_at(grid[i], "problem.grid[" + std::to_string(i) + "]"));
  const json& Q = field(j, "problem", "Q");
  if (!Q.is_array()) bad("problem.Q", "expected an array of matrices");
  if (Q.size() != grid.size())
    raise(ErrorCode::DimensionMismatch,
          "problem.Q: has " + std::to_string(Q.size()) + " nodes, expected " +
              std::to_string(grid.size()));
  for (size_t i = 0; i < Q.size(); ++i)
    p.Q.push_back(mat_at(Q[i], "problem.Q[" + std::to_string(i) + "]", p.m, p.m));
  p.h = mat_at(field(j, "problem", "h"), "problem.h", p.m, p.m);
  p.H = mat_at(field(j, "problem", "H"), "problem.H", p.m, p.m);
  const json& sa = field(j, "problem", "selfadjoint_hint");
  if (!sa.is_boolean()) bad("problem.selfadjoint_hint", "expected a boolean");
  p.selfadjoint_hint = sa.get<bool>();
  p.validate();
  return p;
}

std::string write_spectral(const SpectralData& d) {
  std::string out = "{\n\"version\": \"1\",\n\"m\": ";
  out += std::to_string(d.m);
  out += ",\n\"n_max\": ";
  out += std::to_string(d.n_max);
  out += ",\n\"omega\": [";
  for (int q = 0; q < d.omega.size(); ++q) {
    if (q) out += ", ";
    put_cx(out, d.omega(q));
  }
  out += "],\n\"entries\": [\n";
  for (size_t i = 0; i < d.entries.size(); ++i) {
    const SpectralDatum& e = d.entries[i];
    out += "{\"n\": ";
    out += std::to_string(e.n);
    out += ", \"q\": ";
    out += std::to_string(e.q);
    out += ", \"lambda\": ";
    put_cx(out, e.lambda);
    out += ", \"alpha\": ";
    put_mat(out, e.alpha);
    out += ", \"multiplicity\": ";
    out += std::to_string(e.multiplicity);
    out += ", \"cluster_id\": ";
    out += std::to_string(e.cluster_id);
    out += (i + 1 < d.entries.size()) ? "},\n" : "}\n";
  }
  out += "]\n}\n";
  return out;
}

SpectralData read_spectral(const std::string& text, const Tolerances& tol) {
  json j = parse(text);
  check_version(j, "spectral");
  SpectralData d;
  d.m = int_at(field(j, "spectral", "m"), "spectral.m");
  d.n_max = int_at(field(j, "spectral", "n_max"), "spectral.n_max");
  if (d.m < 1) bad("spectral.m", "must be >= 1");
  if (d.n_max < 0) bad("spectral.n_max", "must be >= 0");
  const json& om = field(j, "spectral", "omega");
  if (!om.is_array()) bad("spectral.omega", "expected an array");
  if (static_cast<int>(om.size()) != d.m)
    raise(ErrorCode::DimensionMismatch,
          "spectral.omega: has " + std::to_string(om.size()) +
              " entries, expected " + std::to_string(d.m));
  d.omega.resize(d.m);
  for (int q = 0; q < d.m; ++q)
    d.omega(q) = cx_at(om[q], "spectral.omega[" + std::to_string(q) + "]");

  const json& entries = field(j, "spectral", "entries");
  if (!entries.is_array()) bad("spectral.entries", "expected an array");
  const int expect = (d.n_max + 1) * d.m;
  if (static_cast<int>(entries.size()) != expect)
    raise(ErrorCode::DimensionMismatch,
          "spectral.entries: has " + std::to_string(entries.size()) +
              " entries, expected " + std::to_string(expect));
  d.entries.resize(expect);
  std::vector<bool> seen(expect, false);
  for (int k = 0; k < expect; ++k) {
    std::string path = "spectral.entries[" + std::to_string(k) + "]";
    const json& ej = entries[k];
    SpectralDatum e;
    e.n = int_at(field(ej, path, "n"), path + ".n");
    e.q = int_at(field(ej, path, "q"), path + ".q");
    if (e.n < 0 || e.n > d.n_max || e.q < 1 || e.q > d.m)
      raise(ErrorCode::DimensionMismatch, path + ": (n, q) out of range");
    e.lambda = cx_at(field(ej, path, "lambda"), path + ".lambda");
    e.rho = sqrt_branch(e.lambda);
    e.alpha = mat_at(field(ej, path, "alpha"), path + ".alpha", d.m, d.m);
    e.multiplicity = int_at(field(ej, path, "multiplicity"), path + ".multiplicity");
    e.cluster_id = int_at(field(ej, path, "cluster_id"), path + ".cluster_id");
    int slot = d.index_of(e.n, e.q);
    if (seen[slot])
      raise(ErrorCode::DimensionMismatch, path + ": duplicate (n, q) label");
    seen[slot] = true;
    d.entries[slot] = e;
  }
  // heads and primed weights from the stored cluster ids
  std::vector<int> head_of;
  for (int i = 0; i < expect; ++i) {
    int id = d.entries[i].cluster_id;
    if (id < 0 || id >= expect)
      raise(ErrorCode::DimensionMismatch,
            "spectral.entries: cluster_id out of range");
    if (id >= static_cast<int>(head_of.size())) head_of.resize(id + 1, -1);
    if (head_of[id] < 0) head_of[id] = i;
  }
  for (int i = 0; i < expect; ++i) {
    SpectralDatum& e = d.entries[i];
    e.cluster_head = head_of[e.cluster_id] == i;
    e.alpha_primed = e.cluster_head ? e.alpha : Mat::Zero(d.m, d.m);
  }
  d.groups = SpectralData::group_channels(d.omega, tol.omega_group);
  d.validate();
  return d;
}

std::string write_result(const ReconstructionResult& r) {
  std::string out = "{\n\"version\": \"1\",\n\"m\": ";
  out += std::to_string(r.m);
  out += ",\n\"n_trunc\": ";
  out += std::to_string(r.n_trunc);
  out += ",\n\"grid\": ";
  put_grid(out, r.grid);
  out += ",\n\"Q_rec\": ";
  put_mat_list(out, r.Q);
  out += ",\n\"h_rec\": ";
  put_mat(out, r.h);
  out += ",\n\"H_rec\": ";
  put_mat(out, r.H);
  out += ",\n\"eps0\": ";
  put_mat_list(out, r.eps0);
  out += ",\n\"diagnostics\": {\n\"Omega\": ";
  put_num(out, r.Omega);
  out += ",\n\"truncation_indicator\": ";
  put_num(out, r.truncation_indicator);
  out += ",\n\"max_residual\": ";
  put_num(out, r.max_residual);
  out += ",\n\"max_cond\": ";
  put_num(out, r.max_cond);
  out += ",\n\"xi\": ";
  put_grid(out, r.xi);
  out += ",\n\"warnings\": [";
  for (size_t i = 0; i < r.warnings.size(); ++i) {
    if (i) out += ", ";
    out += quoted(r.warnings[i]);
  }
  out += "]\n}\n}\n";
  return out;
}

void apply_tolerance_overrides(Tolerances& tol, const std::string& text) {
  json j = parse(text);
  if (!j.is_object())
    bad("tolerances", "expected an object of {name: value}");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_number())
      bad("tolerances." + it.key(), "expected a number");
    tol.set(it.key(), it.value().get<double>());
  }
}

std::string load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void save_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::IoError, "cannot open " + path + " for writing");
  out << contents;
  if (!out.good()) raise(ErrorCode::IoError, "write failed for " + path);
}

}  // namespace io
}  // namespace matsl
