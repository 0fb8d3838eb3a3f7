// matsl-cli: forward / inverse / check / roundtrip driver over the C API.
//
// Exit codes: 0 success, 1 generic failure or failed checks,
// 2 AssumptionOneViolated, 3 CountMismatch, 4 MainEquationSingular
// (or condition (R) rejection of inverse input).

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "matsl/matsl.h"

namespace {

int exit_code_of(matsl_status st) {
  switch (st) {
    case MATSL_OK: return 0;
    case MATSL_E_ASSUMPTION_ONE: return 2;
    case MATSL_E_COUNT_MISMATCH: return 3;
    case MATSL_E_MAIN_SINGULAR: return 4;
    default: return 1;
  }
}

[[noreturn]] void die(matsl_status st) {
  std::fprintf(stderr, "error: %s\n", matsl_last_error());
  std::exit(exit_code_of(st));
}

void check(matsl_status st) {
  if (st != MATSL_OK) die(st);
}

struct Common {
  std::vector<std::string> tol_overrides;
  int workers = 0;
  bool emit_plots = false;
};

using OptionsPtr = std::unique_ptr<matsl_options, decltype(&matsl_options_free)>;

OptionsPtr build_options(const Common& c) {
  OptionsPtr opt(matsl_options_new(), &matsl_options_free);
  if (!opt) {
    std::fprintf(stderr, "error: out of memory\n");
    std::exit(1);
  }
  if (const char* path = std::getenv("MATSPEC_TOL_FILE")) {
    std::ifstream in(path);
    if (!in) {
      std::fprintf(stderr, "error: cannot open MATSPEC_TOL_FILE %s\n", path);
      std::exit(1);
    }
    nlohmann::json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s: %s\n", path, e.what());
      std::exit(1);
    }
    if (!j.is_object()) {
      std::fprintf(stderr, "error: %s: expected {name: value}\n", path);
      std::exit(1);
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!it.value().is_number()) {
        std::fprintf(stderr, "error: %s: %s must be a number\n", path,
                     it.key().c_str());
        std::exit(1);
      }
      check(matsl_options_set_tolerance(opt.get(), it.key().c_str(),
                                        it.value().get<double>()));
    }
  }
  for (const std::string& kv : c.tol_overrides) {
    size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --tol-override expects KEY=VAL, got %s\n",
                   kv.c_str());
      std::exit(1);
    }
    std::string key = kv.substr(0, eq);
    double value = 0.0;
    try {
      value = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      std::fprintf(stderr, "error: --tol-override %s: bad number\n", kv.c_str());
      std::exit(1);
    }
    check(matsl_options_set_tolerance(opt.get(), key.c_str(), value));
  }
  check(matsl_options_set_workers(opt.get(), c.workers));
  return opt;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::fprintf(stderr, "error: cannot write %s\n", path.c_str());
    std::exit(1);
  }
  out << text;
}

std::string render_report(const matsl_report* rep) {
  char* text = nullptr;
  check(matsl_report_render(rep, &text));
  std::string s = text ? text : "";
  matsl_string_free(text);
  return s;
}

// Dense problem arrays pulled through the C API.
struct ProblemArrays {
  int m = 0, nodes = 0;
  std::vector<double> grid, q_re, q_im, h_re, h_im, H_re, H_im;
};

ProblemArrays fetch_problem(const matsl_problem* p) {
  ProblemArrays a;
  check(matsl_problem_dims(p, &a.m, &a.nodes));
  a.grid.resize(a.nodes);
  a.q_re.resize(static_cast<size_t>(a.nodes) * a.m * a.m);
  a.q_im.resize(a.q_re.size());
  a.h_re.resize(static_cast<size_t>(a.m) * a.m);
  a.h_im.resize(a.h_re.size());
  a.H_re.resize(a.h_re.size());
  a.H_im.resize(a.h_re.size());
  check(matsl_problem_data(p, a.grid.data(), a.q_re.data(), a.q_im.data(),
                           a.h_re.data(), a.h_im.data(), a.H_re.data(),
                           a.H_im.data()));
  return a;
}

// Piecewise-linear Q(x) on the stored grid; row-sum norm of the difference
// against another sampled potential drives the error tables.
std::vector<std::complex<double>> q_at(const ProblemArrays& a, double x) {
  int lo = 0, hi = a.nodes - 1;
  if (x <= a.grid.front()) {
    hi = 1;
  } else if (x >= a.grid.back()) {
    lo = a.nodes - 2;
  } else {
    while (hi - lo > 1) {
      int mid = (lo + hi) / 2;
      (a.grid[mid] <= x ? lo : hi) = mid;
    }
  }
  double t = (x - a.grid[lo]) / (a.grid[hi] - a.grid[lo]);
  std::vector<std::complex<double>> q(static_cast<size_t>(a.m) * a.m);
  for (size_t k = 0; k < q.size(); ++k) {
    std::complex<double> va(a.q_re[lo * q.size() + k], a.q_im[lo * q.size() + k]);
    std::complex<double> vb(a.q_re[hi * q.size() + k], a.q_im[hi * q.size() + k]);
    q[k] = va + t * (vb - va);
  }
  return q;
}

double row_sum(const std::vector<std::complex<double>>& a, int m) {
  double best = 0.0;
  for (int r = 0; r < m; ++r) {
    double s = 0.0;
    for (int c = 0; c < m; ++c) s += std::abs(a[r * m + c]);
    best = std::max(best, s);
  }
  return best;
}

struct RoundtripErrors {
  double q_l2 = 0.0, q_sup = 0.0, h_err = 0.0, H_err = 0.0;
  std::vector<double> per_node;  // row-sum error at each reconstruction node
};

RoundtripErrors compare_problems(const ProblemArrays& input,
                                 const ProblemArrays& rec) {
  RoundtripErrors e;
  e.per_node.resize(rec.nodes, 0.0);
  double acc = 0.0;
  const int m = rec.m;
  for (int i = 0; i < rec.nodes; ++i) {
    std::vector<std::complex<double>> qin = q_at(input, rec.grid[i]);
    std::vector<std::complex<double>> diff(static_cast<size_t>(m) * m);
    for (size_t k = 0; k < diff.size(); ++k)
      diff[k] = std::complex<double>(rec.q_re[i * diff.size() + k],
                                     rec.q_im[i * diff.size() + k]) -
                qin[k];
    double err = row_sum(diff, m);
    e.per_node[i] = err;
    e.q_sup = std::max(e.q_sup, err);
    double fro2 = 0.0;
    for (const auto& d : diff) fro2 += std::norm(d);
    double w = 0.0;
    if (i > 0) w += 0.5 * (rec.grid[i] - rec.grid[i - 1]);
    if (i + 1 < rec.nodes) w += 0.5 * (rec.grid[i + 1] - rec.grid[i]);
    acc += fro2 * w;
  }
  e.q_l2 = std::sqrt(acc);
  for (size_t k = 0; k < input.h_re.size(); ++k) {
    e.h_err = std::max(e.h_err, std::abs(std::complex<double>(
                                    rec.h_re[k] - input.h_re[k],
                                    rec.h_im[k] - input.h_im[k])));
    e.H_err = std::max(e.H_err, std::abs(std::complex<double>(
                                    rec.H_re[k] - input.H_re[k],
                                    rec.H_im[k] - input.H_im[k])));
  }
  return e;
}

std::vector<int> parse_sweep(const std::string& sweep) {
  std::vector<int> out;
  std::stringstream ss(sweep);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stoi(tok));
  }
  return out;
}

// ---- subcommands -------------------------------------------------------

int cmd_forward(const std::string& problem_path, const std::string& out_path,
                int n_max, const Common& common) {
  OptionsPtr opt = build_options(common);
  matsl_problem* prob = nullptr;
  check(matsl_problem_read(problem_path.c_str(), &prob));
  matsl_spectral* data = nullptr;
  matsl_status st = matsl_forward(prob, n_max, opt.get(), &data);
  if (st != MATSL_OK) {
    matsl_problem_free(prob);
    die(st);
  }
  check(matsl_spectral_write(data, out_path.c_str()));
  std::printf("wrote %s\n", out_path.c_str());

  matsl_report* rep = nullptr;
  check(matsl_check_structural(prob, data, opt.get(), &rep));
  std::fputs(render_report(rep).c_str(), stdout);
  matsl_report_free(rep);
  check(matsl_check_conditions(data, "S", -1, opt.get(), &rep));
  std::fputs(render_report(rep).c_str(), stdout);
  matsl_report_free(rep);

  if (common.emit_plots) {
    int m = 0, nm = 0;
    check(matsl_spectral_dims(data, &m, &nm));
    std::vector<double> wre(m), wim(m);
    check(matsl_spectral_omega(data, wre.data(), wim.data()));
    std::ostringstream csv;
    csv << "n,q,rho_re,rho_im,residual\n";
    for (int n = 0; n <= nm; ++n)
      for (int q = 1; q <= m; ++q) {
        double lre = 0.0, lim = 0.0;
        check(matsl_spectral_entry(data, n, q, &lre, &lim, nullptr, nullptr,
                                   nullptr, nullptr));
        std::complex<double> rho = std::sqrt(std::complex<double>(lre, lim));
        if (rho.real() < 0.0 || (rho.real() == 0.0 && rho.imag() < 0.0))
          rho = -rho;
        double res = 0.0;
        if (n >= 1) {
          std::complex<double> seed(
              n + wre[q - 1] / (M_PI * n), wim[q - 1] / (M_PI * n));
          res = std::abs(rho - seed) * n;
        }
        char line[160];
        std::snprintf(line, sizeof(line), "%d,%d,%.17g,%.17g,%.17g\n", n, q,
                      rho.real(), rho.imag(), res);
        csv << line;
      }
    write_text_file(out_path + ".rho.csv", csv.str());
    std::printf("wrote %s.rho.csv\n", out_path.c_str());
  }
  matsl_spectral_free(data);
  matsl_problem_free(prob);
  return 0;
}

int cmd_inverse(const std::string& data_path, const std::string& out_path,
                int n_trunc, int grid_nodes, const Common& common) {
  OptionsPtr opt = build_options(common);
  matsl_spectral* data = nullptr;
  check(matsl_spectral_read(data_path.c_str(), opt.get(), &data));
  int m = 0, n_max = 0;
  check(matsl_spectral_dims(data, &m, &n_max));
  if (n_trunc < 0) n_trunc = n_max;
  if (n_trunc < 2 || n_trunc > n_max) {
    std::fprintf(stderr, "error: need 2 <= ntrunc <= n_max (%d)\n", n_max);
    return 1;
  }

  // Condition (R) guards unique solvability of the main equation; reject
  // corrupted data instead of reconstructing from it.
  matsl_report* rgate = nullptr;
  check(matsl_check_conditions(data, "R", -1, opt.get(), &rgate));
  int rv = 0;
  check(matsl_report_verdict(rgate, "R", &rv));
  if (rv != 1) {
    std::fputs(render_report(rgate).c_str(), stderr);
    std::fprintf(stderr,
                 "error: input data violate condition (R); the main equation "
                 "is not uniquely solvable\n");
    matsl_report_free(rgate);
    matsl_spectral_free(data);
    return 4;
  }
  matsl_report_free(rgate);

  matsl_result* result = nullptr;
  matsl_status st = matsl_inverse(data, n_trunc, grid_nodes, opt.get(), &result);
  if (st != MATSL_OK) {
    matsl_spectral_free(data);
    die(st);
  }
  int warn_count = 0;
  check(matsl_result_warning_count(result, &warn_count));
  for (int i = 0; i < warn_count; ++i) {
    char* w = nullptr;
    check(matsl_result_warning(result, i, &w));
    std::printf("warning: %s\n", w);
    matsl_string_free(w);
  }
  double Omega = 0.0, indicator = 0.0, resid = 0.0, cond = 0.0;
  check(matsl_result_stats(result, &Omega, &indicator, &resid, &cond));
  std::printf("Omega=%.6e truncation_indicator=%.6e max_residual=%.6e "
              "max_cond=%.6e\n",
              Omega, indicator, resid, cond);
  check(matsl_result_write(result, out_path.c_str()));
  std::printf("wrote %s\n", out_path.c_str());

  if (common.emit_plots) {
    std::vector<double> xi(n_max + 1);
    int count = 0;
    check(matsl_result_xi(result, xi.data(), n_max + 1, &count));
    std::ostringstream csv;
    csv << "n,xi\n";
    for (int n = 0; n < count; ++n) {
      char line[64];
      std::snprintf(line, sizeof(line), "%d,%.17g\n", n, xi[n]);
      csv << line;
    }
    write_text_file(out_path + ".xi.csv", csv.str());
    std::printf("wrote %s.xi.csv\n", out_path.c_str());
  }
  matsl_result_free(result);
  matsl_spectral_free(data);
  return 0;
}

int cmd_check(const std::string& data_path, const std::string& conditions,
              int n_bands, const Common& common) {
  OptionsPtr opt = build_options(common);
  matsl_spectral* data = nullptr;
  check(matsl_spectral_read(data_path.c_str(), opt.get(), &data));
  matsl_report* rep = nullptr;
  check(matsl_check_conditions(data, conditions.c_str(), n_bands, opt.get(),
                               &rep));
  std::fputs(render_report(rep).c_str(), stdout);
  int ok = 0;
  check(matsl_report_passed(rep, &ok));
  matsl_report_free(rep);
  matsl_spectral_free(data);
  return ok ? 0 : 1;
}

int cmd_roundtrip(const std::string& problem_path, const std::string& out_prefix,
                  int n_max, int n_trunc, int grid_nodes,
                  const std::string& sweep, const Common& common) {
  OptionsPtr opt = build_options(common);
  matsl_problem* prob = nullptr;
  check(matsl_problem_read(problem_path.c_str(), &prob));
  ProblemArrays input = fetch_problem(prob);

  matsl_spectral* data = nullptr;
  matsl_status st = matsl_forward(prob, n_max, opt.get(), &data);
  if (st != MATSL_OK) {
    matsl_problem_free(prob);
    die(st);
  }

  std::vector<int> truncs;
  if (!sweep.empty())
    truncs = parse_sweep(sweep);
  else
    truncs.push_back(n_trunc < 0 ? n_max : n_trunc);

  std::printf("n_trunc,q_l2,q_sup,h_err,H_err,indicator\n");
  RoundtripErrors last;
  for (int N : truncs) {
    if (N < 2 || N > n_max) {
      std::fprintf(stderr, "error: sweep value %d outside [2, n_max]\n", N);
      return 1;
    }
    matsl_result* result = nullptr;
    st = matsl_inverse(data, N, grid_nodes, opt.get(), &result);
    if (st != MATSL_OK) {
      matsl_spectral_free(data);
      matsl_problem_free(prob);
      die(st);
    }
    matsl_problem* rec = nullptr;
    check(matsl_result_problem(result, &rec));
    ProblemArrays recovered = fetch_problem(rec);
    last = compare_problems(input, recovered);
    double indicator = 0.0;
    check(matsl_result_stats(result, nullptr, &indicator, nullptr, nullptr));
    std::printf("%d,%.6e,%.6e,%.6e,%.6e,%.6e\n", N, last.q_l2, last.q_sup,
                last.h_err, last.H_err, indicator);
    if (common.emit_plots) {
      std::ostringstream csv;
      csv << "x,q_error\n";
      for (int i = 0; i < recovered.nodes; ++i) {
        char line[80];
        std::snprintf(line, sizeof(line), "%.17g,%.17g\n", recovered.grid[i],
                      last.per_node[i]);
        csv << line;
      }
      std::string path = out_prefix + ".err" + std::to_string(N) + ".csv";
      write_text_file(path, csv.str());
      std::printf("wrote %s\n", path.c_str());
    }
    matsl_problem_free(rec);
    matsl_result_free(result);
  }
  matsl_spectral_free(data);
  matsl_problem_free(prob);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matrix Sturm-Liouville spectral toolkit"};
  app.require_subcommand(1);

  Common common;
  std::string problem_path, data_path, out_path = "out.json";
  std::string conditions = "A,R,S,C", sweep;
  int n_max = 12, n_trunc = -1, grid_nodes = 257, n_bands = -1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--tol-override", common.tol_overrides,
                    "tolerance override KEY=VAL (repeatable)");
    cmd->add_option("--workers", common.workers, "worker thread count");
    cmd->add_flag("--emit-plots", common.emit_plots, "write CSV tables");
  };

  CLI::App* fwd = app.add_subcommand("forward", "compute spectral data");
  fwd->add_option("--problem", problem_path, "problem file")->required();
  fwd->add_option("--out", out_path, "output spectral data file")->required();
  fwd->add_option("--nmax", n_max, "number of bands");
  add_common(fwd);

  CLI::App* inv = app.add_subcommand("inverse", "reconstruct Q, h, H");
  inv->add_option("--data", data_path, "spectral data file")->required();
  inv->add_option("--out", out_path, "output result file")->required();
  inv->add_option("--ntrunc", n_trunc, "truncation bands (default n_max)");
  inv->add_option("--grid", grid_nodes, "reconstruction grid nodes")
      ->check(CLI::Range(65, 100000));
  add_common(inv);

  CLI::App* chk = app.add_subcommand("check", "characterization conditions");
  chk->add_option("--data", data_path, "spectral data file")->required();
  chk->add_option("--conditions", conditions, "subset of A,R,S,C");
  chk->add_option("--nbands", n_bands, "bands for (C) (default n_max)");
  add_common(chk);

  CLI::App* rt = app.add_subcommand("roundtrip", "forward + inverse + compare");
  rt->add_option("--problem", problem_path, "problem file")->required();
  rt->add_option("--out", out_path, "output prefix for CSV tables");
  rt->add_option("--nmax", n_max, "number of bands");
  rt->add_option("--ntrunc", n_trunc, "truncation bands (default n_max)");
  rt->add_option("--grid", grid_nodes, "reconstruction grid nodes")
      ->check(CLI::Range(65, 100000));
  rt->add_option("--sweep", sweep, "comma list of N_trunc values");
  add_common(rt);

  CLI11_PARSE(app, argc, argv);

  if (fwd->parsed()) return cmd_forward(problem_path, out_path, n_max, common);
  if (inv->parsed())
    return cmd_inverse(data_path, out_path, n_trunc, grid_nodes, common);
  if (chk->parsed()) return cmd_check(data_path, conditions, n_bands, common);
  if (rt->parsed())
    return cmd_roundtrip(problem_path, out_path, n_max, n_trunc, grid_nodes,
                         sweep, common);
  return 1;
}
