#include "matsl/matsl.h"

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "../core/conditions.hpp"
#include "../core/errors.hpp"
#include "../core/forward.hpp"
#include "../core/inverse.hpp"
#include "../core/io.hpp"
#include "../core/model.hpp"

using namespace matsl;

struct matsl_options {
  Tolerances tol;
  int workers = 0;
};

struct matsl_problem {
  BoundaryProblem v;
};
struct matsl_spectral {
  SpectralData v;
};
struct matsl_result {
  ReconstructionResult v;
};
struct matsl_report {
  ConditionReport v;
};

namespace {

thread_local std::string g_last_error;

matsl_status status_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::Ok: return MATSL_OK;
    case ErrorCode::InvalidArgument: return MATSL_E_INVALID_ARGUMENT;
    case ErrorCode::ParseError: return MATSL_E_PARSE;
    case ErrorCode::DimensionMismatch: return MATSL_E_DIMENSION;
    case ErrorCode::UnsupportedVersion: return MATSL_E_UNSUPPORTED_VERSION;
    case ErrorCode::IoError: return MATSL_E_IO;
    case ErrorCode::NonFiniteState: return MATSL_E_NONFINITE;
    case ErrorCode::NearSingular: return MATSL_E_NEAR_SINGULAR;
    case ErrorCode::CountMismatch: return MATSL_E_COUNT_MISMATCH;
    case ErrorCode::NoConvergence: return MATSL_E_NO_CONVERGENCE;
    case ErrorCode::AssumptionOneViolated: return MATSL_E_ASSUMPTION_ONE;
    case ErrorCode::ContourCollision: return MATSL_E_CONTOUR_COLLISION;
    case ErrorCode::TruncationTooLarge: return MATSL_E_TRUNCATION;
    case ErrorCode::MainEquationSingular: return MATSL_E_MAIN_SINGULAR;
    case ErrorCode::GridMismatch: return MATSL_E_GRID_MISMATCH;
    default: return MATSL_E_INTERNAL;
  }
}

template <typename F>
matsl_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return MATSL_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MATSL_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return MATSL_E_INTERNAL;
  }
}

matsl_status fail_null(const char* what) {
  g_last_error = std::string(what) + ": null pointer argument";
  return MATSL_E_NULL_POINTER;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Tolerances tol_of(const matsl_options* o) {
  return o ? o->tol : Tolerances{};
}
int workers_of(const matsl_options* o) { return o ? o->workers : 0; }

void fill_complex(const Mat& a, double* re, double* im) {
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) {
      if (re) re[r * a.cols() + c] = a(r, c).real();
      if (im) im[r * a.cols() + c] = a(r, c).imag();
    }
}

}  // namespace

extern "C" {

const char* matsl_version(void) { return "1.0.0"; }

const char* matsl_last_error(void) { return g_last_error.c_str(); }

void matsl_string_free(char* s) { std::free(s); }

/* ---- options ---- */

matsl_options* matsl_options_new(void) { return new (std::nothrow) matsl_options; }

void matsl_options_free(matsl_options* o) { delete o; }

matsl_status matsl_options_set_tolerance(matsl_options* o, const char* key,
                                         double value) {
  if (!o || !key) return fail_null("matsl_options_set_tolerance");
  return guarded([&] { o->tol.set(key, value); });
}

matsl_status matsl_options_get_tolerance(const matsl_options* o,
                                         const char* key, double* value) {
  if (!o || !key || !value) return fail_null("matsl_options_get_tolerance");
  return guarded([&] { *value = o->tol.get(key); });
}

matsl_status matsl_options_set_workers(matsl_options* o, int workers) {
  if (!o) return fail_null("matsl_options_set_workers");
  o->workers = workers;
  return MATSL_OK;
}

/* ---- problems ---- */

matsl_status matsl_problem_create(int m, int nodes, const double* grid,
                                  const double* q_re, const double* q_im,
                                  const double* h_re, const double* h_im,
                                  const double* bigh_re, const double* bigh_im,
                                  int selfadjoint_hint, matsl_problem** out) {
  if (!grid || !q_re || !h_re || !bigh_re || !out)
    return fail_null("matsl_problem_create");
  return guarded([&] {
    BoundaryProblem p;
    p.m = m;
    p.grid.assign(grid, grid + nodes);
    p.Q.resize(nodes);
    auto read_mat = [&](const double* re, const double* im, int offset) {
      Mat a(m, m);
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) {
          int k = offset + r * m + c;
          a(r, c) = cx(re[k], im ? im[k] : 0.0);
        }
      return a;
    };
    for (int i = 0; i < nodes; ++i) p.Q[i] = read_mat(q_re, q_im, i * m * m);
    p.h = read_mat(h_re, h_im, 0);
    p.H = read_mat(bigh_re, bigh_im, 0);
    p.selfadjoint_hint = selfadjoint_hint != 0;
    p.validate();
    *out = new matsl_problem{std::move(p)};
  });
}

matsl_status matsl_problem_from_text(const char* text, matsl_problem** out) {
  if (!text || !out) return fail_null("matsl_problem_from_text");
  return guarded([&] { *out = new matsl_problem{io::read_problem(text)}; });
}

matsl_status matsl_problem_to_text(const matsl_problem* p, char** out) {
  if (!p || !out) return fail_null("matsl_problem_to_text");
  return guarded([&] { *out = dup_string(io::write_problem(p->v)); });
}

matsl_status matsl_problem_read(const char* path, matsl_problem** out) {
  if (!path || !out) return fail_null("matsl_problem_read");
  return guarded(
      [&] { *out = new matsl_problem{io::read_problem(io::load_file(path))}; });
}

matsl_status matsl_problem_write(const matsl_problem* p, const char* path) {
  if (!p || !path) return fail_null("matsl_problem_write");
  return guarded([&] { io::save_file(path, io::write_problem(p->v)); });
}

matsl_status matsl_problem_dims(const matsl_problem* p, int* m, int* nodes) {
  if (!p) return fail_null("matsl_problem_dims");
  if (m) *m = p->v.m;
  if (nodes) *nodes = static_cast<int>(p->v.grid.size());
  return MATSL_OK;
}

matsl_status matsl_problem_data(const matsl_problem* p, double* grid,
                                double* q_re, double* q_im, double* h_re,
                                double* h_im, double* bigh_re,
                                double* bigh_im) {
  if (!p) return fail_null("matsl_problem_data");
  const BoundaryProblem& v = p->v;
  const int m = v.m, mm = m * m;
  if (grid)
    std::memcpy(grid, v.grid.data(), v.grid.size() * sizeof(double));
  if (q_re || q_im)
    for (size_t i = 0; i < v.Q.size(); ++i)
      fill_complex(v.Q[i], q_re ? q_re + i * mm : nullptr,
                   q_im ? q_im + i * mm : nullptr);
  fill_complex(v.h, h_re, h_im);
  fill_complex(v.H, bigh_re, bigh_im);
  return MATSL_OK;
}

void matsl_problem_free(matsl_problem* p) { delete p; }

/* ---- forward ---- */

matsl_status matsl_forward(const matsl_problem* p, int n_max,
                           const matsl_options* o, matsl_spectral** out) {
  if (!p || !out) return fail_null("matsl_forward");
  return guarded([&] {
    *out = new matsl_spectral{
        forward_spectral_data(p->v, n_max, tol_of(o), workers_of(o))};
  });
}

/* ---- spectral data ---- */

matsl_status matsl_spectral_from_text(const char* text, const matsl_options* o,
                                      matsl_spectral** out) {
  if (!text || !out) return fail_null("matsl_spectral_from_text");
  return guarded(
      [&] { *out = new matsl_spectral{io::read_spectral(text, tol_of(o))}; });
}

matsl_status matsl_spectral_to_text(const matsl_spectral* d, char** out) {
  if (!d || !out) return fail_null("matsl_spectral_to_text");
  return guarded([&] { *out = dup_string(io::write_spectral(d->v)); });
}

matsl_status matsl_spectral_read(const char* path, const matsl_options* o,
                                 matsl_spectral** out) {
  if (!path || !out) return fail_null("matsl_spectral_read");
  return guarded([&] {
    *out = new matsl_spectral{io::read_spectral(io::load_file(path), tol_of(o))};
  });
}

matsl_status matsl_spectral_write(const matsl_spectral* d, const char* path) {
  if (!d || !path) return fail_null("matsl_spectral_write");
  return guarded([&] { io::save_file(path, io::write_spectral(d->v)); });
}

matsl_status matsl_spectral_dims(const matsl_spectral* d, int* m, int* n_max) {
  if (!d) return fail_null("matsl_spectral_dims");
  if (m) *m = d->v.m;
  if (n_max) *n_max = d->v.n_max;
  return MATSL_OK;
}

matsl_status matsl_spectral_omega(const matsl_spectral* d, double* omega_re,
                                  double* omega_im) {
  if (!d) return fail_null("matsl_spectral_omega");
  for (int q = 0; q < d->v.m; ++q) {
    if (omega_re) omega_re[q] = d->v.omega(q).real();
    if (omega_im) omega_im[q] = d->v.omega(q).imag();
  }
  return MATSL_OK;
}

matsl_status matsl_spectral_entry(const matsl_spectral* d, int n, int q,
                                  double* lambda_re, double* lambda_im,
                                  double* alpha_re, double* alpha_im,
                                  int* multiplicity, int* cluster_id) {
  if (!d) return fail_null("matsl_spectral_entry");
  return guarded([&] {
    if (n < 0 || n > d->v.n_max || q < 1 || q > d->v.m)
      raise(ErrorCode::InvalidArgument, "matsl_spectral_entry: (n, q) out of range");
    const SpectralDatum& e = d->v.at(n, q);
    if (lambda_re) *lambda_re = e.lambda.real();
    if (lambda_im) *lambda_im = e.lambda.imag();
    if (alpha_re || alpha_im) fill_complex(e.alpha, alpha_re, alpha_im);
    if (multiplicity) *multiplicity = e.multiplicity;
    if (cluster_id) *cluster_id = e.cluster_id;
  });
}

matsl_status matsl_spectral_model(const matsl_spectral* d,
                                  const matsl_options* o,
                                  matsl_spectral** out) {
  if (!d || !out) return fail_null("matsl_spectral_model");
  return guarded([&] {
    *out = new matsl_spectral{
        model_spectral_data(d->v.omega, d->v.n_max, tol_of(o))};
  });
}

void matsl_spectral_free(matsl_spectral* d) { delete d; }

/* ---- inverse ---- */

matsl_status matsl_inverse(const matsl_spectral* d, int n_trunc,
                           int grid_nodes, const matsl_options* o,
                           matsl_result** out) {
  if (!d || !out) return fail_null("matsl_inverse");
  return guarded([&] {
    if (grid_nodes < 5)
      raise(ErrorCode::InvalidArgument, "matsl_inverse: grid_nodes must be >= 5");
    *out = new matsl_result{reconstruct(d->v, n_trunc, uniform_grid(grid_nodes),
                                        tol_of(o), workers_of(o))};
  });
}

matsl_status matsl_result_problem(const matsl_result* r, matsl_problem** out) {
  if (!r || !out) return fail_null("matsl_result_problem");
  return guarded([&] { *out = new matsl_problem{r->v.as_problem()}; });
}

matsl_status matsl_result_to_text(const matsl_result* r, char** out) {
  if (!r || !out) return fail_null("matsl_result_to_text");
  return guarded([&] { *out = dup_string(io::write_result(r->v)); });
}

matsl_status matsl_result_write(const matsl_result* r, const char* path) {
  if (!r || !path) return fail_null("matsl_result_write");
  return guarded([&] { io::save_file(path, io::write_result(r->v)); });
}

matsl_status matsl_result_stats(const matsl_result* r, double* omega_bound,
                                double* truncation_indicator,
                                double* max_residual, double* max_cond) {
  if (!r) return fail_null("matsl_result_stats");
  if (omega_bound) *omega_bound = r->v.Omega;
  if (truncation_indicator) *truncation_indicator = r->v.truncation_indicator;
  if (max_residual) *max_residual = r->v.max_residual;
  if (max_cond) *max_cond = r->v.max_cond;
  return MATSL_OK;
}

matsl_status matsl_result_xi(const matsl_result* r, double* xi, int capacity,
                             int* count) {
  if (!r || !xi || !count) return fail_null("matsl_result_xi");
  int n = static_cast<int>(r->v.xi.size());
  if (capacity < n) {
    g_last_error = "matsl_result_xi: buffer too small";
    return MATSL_E_INVALID_ARGUMENT;
  }
  std::memcpy(xi, r->v.xi.data(), n * sizeof(double));
  *count = n;
  return MATSL_OK;
}

matsl_status matsl_result_warning_count(const matsl_result* r, int* count) {
  if (!r || !count) return fail_null("matsl_result_warning_count");
  *count = static_cast<int>(r->v.warnings.size());
  return MATSL_OK;
}

matsl_status matsl_result_warning(const matsl_result* r, int index, char** out) {
  if (!r || !out) return fail_null("matsl_result_warning");
  if (index < 0 || index >= static_cast<int>(r->v.warnings.size())) {
    g_last_error = "matsl_result_warning: index out of range";
    return MATSL_E_INVALID_ARGUMENT;
  }
  *out = dup_string(r->v.warnings[index]);
  return MATSL_OK;
}

void matsl_result_free(matsl_result* r) { delete r; }

/* ---- checks ---- */

matsl_status matsl_check_conditions(const matsl_spectral* d,
                                    const char* conditions, int n_bands,
                                    const matsl_options* o,
                                    matsl_report** out) {
  if (!d || !conditions || !out) return fail_null("matsl_check_conditions");
  return guarded([&] {
    Tolerances tol = tol_of(o);
    ConditionReport rep;
    std::stringstream ss(conditions);
    std::string name;
    while (std::getline(ss, name, ',')) {
      size_t a = name.find_first_not_of(" \t");
      size_t b = name.find_last_not_of(" \t");
      if (a == std::string::npos) continue;
      name = name.substr(a, b - a + 1);
      if (name == "A") {
        rep.items.push_back(check_A(d->v, tol));
      } else if (name == "R") {
        rep.items.push_back(check_R(d->v, tol));
      } else if (name == "S") {
        rep.items.push_back(check_S(d->v, tol));
      } else if (name == "C") {
        int nb = (n_bands < 0) ? d->v.n_max : n_bands;
        rep.items.push_back(check_C(d->v, nb, tol));
      } else {
        raise(ErrorCode::InvalidArgument,
              "matsl_check_conditions: unknown condition \"" + name + "\"");
      }
    }
    if (rep.items.empty())
      raise(ErrorCode::InvalidArgument,
            "matsl_check_conditions: no conditions requested");
    *out = new matsl_report{std::move(rep)};
  });
}

matsl_status matsl_check_structural(const matsl_problem* p,
                                    const matsl_spectral* d,
                                    const matsl_options* o,
                                    matsl_report** out) {
  if (!p || !d || !out) return fail_null("matsl_check_structural");
  return guarded([&] {
    ConditionReport rep;
    rep.items.push_back(
        check_structural(p->v, d->v, tol_of(o), workers_of(o)));
    *out = new matsl_report{std::move(rep)};
  });
}

matsl_status matsl_report_verdict(const matsl_report* r, const char* condition,
                                  int* verdict) {
  if (!r || !condition || !verdict) return fail_null("matsl_report_verdict");
  const ConditionItem* it = r->v.find(condition);
  if (!it) {
    g_last_error = std::string("matsl_report_verdict: no condition \"") +
                   condition + "\" in report";
    return MATSL_E_INVALID_ARGUMENT;
  }
  *verdict = (it->verdict == Verdict::Pass)   ? 1
             : (it->verdict == Verdict::Fail) ? 0
                                              : -1;
  return MATSL_OK;
}

matsl_status matsl_report_metric(const matsl_report* r, const char* condition,
                                 const char* key, double* value) {
  if (!r || !condition || !key || !value) return fail_null("matsl_report_metric");
  const ConditionItem* it = r->v.find(condition);
  if (!it) {
    g_last_error = std::string("matsl_report_metric: no condition \"") +
                   condition + "\" in report";
    return MATSL_E_INVALID_ARGUMENT;
  }
  for (const auto& kv : it->metrics)
    if (kv.first == key) {
      *value = kv.second;
      return MATSL_OK;
    }
  g_last_error = std::string("matsl_report_metric: no metric \"") + key + "\"";
  return MATSL_E_INVALID_ARGUMENT;
}

matsl_status matsl_report_passed(const matsl_report* r, int* all_passed) {
  if (!r || !all_passed) return fail_null("matsl_report_passed");
  *all_passed = r->v.all_passed() ? 1 : 0;
  return MATSL_OK;
}

matsl_status matsl_report_render(const matsl_report* r, char** out) {
  if (!r || !out) return fail_null("matsl_report_render");
  return guarded([&] { *out = dup_string(r->v.render_table()); });
}

void matsl_report_free(matsl_report* r) { delete r; }

}  // extern "C"
