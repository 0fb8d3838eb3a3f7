/* matsl: matrix Sturm-Liouville spectral toolkit - public C API.
 *
 * All objects are opaque handles created and destroyed by this library.
 * Every fallible call returns a matsl_status; on failure the handle output
 * is untouched and matsl_last_error() carries a thread-local message.
 * Strings returned through char** are heap copies; release them with
 * matsl_string_free().
 */
#ifndef MATSL_H
#define MATSL_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum matsl_status {
  MATSL_OK = 0,
  MATSL_E_INVALID_ARGUMENT = 1,
  MATSL_E_PARSE = 2,
  MATSL_E_DIMENSION = 3,
  MATSL_E_UNSUPPORTED_VERSION = 4,
  MATSL_E_IO = 5,
  MATSL_E_NONFINITE = 6,
  MATSL_E_NEAR_SINGULAR = 7,
  MATSL_E_COUNT_MISMATCH = 8,
  MATSL_E_NO_CONVERGENCE = 9,
  MATSL_E_ASSUMPTION_ONE = 10,
  MATSL_E_CONTOUR_COLLISION = 11,
  MATSL_E_TRUNCATION = 12,
  MATSL_E_MAIN_SINGULAR = 13,
  MATSL_E_GRID_MISMATCH = 14,
  MATSL_E_NULL_POINTER = 15,
  MATSL_E_INTERNAL = 16
} matsl_status;

typedef struct matsl_options matsl_options;
typedef struct matsl_problem matsl_problem;
typedef struct matsl_spectral matsl_spectral;
typedef struct matsl_result matsl_result;
typedef struct matsl_report matsl_report;

const char* matsl_version(void);
/* Message of the last failing call on this thread ("" if none). */
const char* matsl_last_error(void);
void matsl_string_free(char* s);

/* ---- options: tolerance overrides and worker count ---- */
matsl_options* matsl_options_new(void);
void matsl_options_free(matsl_options* o);
matsl_status matsl_options_set_tolerance(matsl_options* o, const char* key,
                                         double value);
matsl_status matsl_options_get_tolerance(const matsl_options* o,
                                         const char* key, double* value);
matsl_status matsl_options_set_workers(matsl_options* o, int workers);

/* ---- boundary problems ---- */
/* Dense row-major real/imag parts: q is nodes*m*m, h and bigh are m*m. */
matsl_status matsl_problem_create(int m, int nodes, const double* grid,
                                  const double* q_re, const double* q_im,
                                  const double* h_re, const double* h_im,
                                  const double* bigh_re, const double* bigh_im,
                                  int selfadjoint_hint, matsl_problem** out);
matsl_status matsl_problem_from_text(const char* text, matsl_problem** out);
matsl_status matsl_problem_to_text(const matsl_problem* p, char** out);
matsl_status matsl_problem_read(const char* path, matsl_problem** out);
matsl_status matsl_problem_write(const matsl_problem* p, const char* path);
matsl_status matsl_problem_dims(const matsl_problem* p, int* m, int* nodes);
/* Copies out grid (nodes), Q (nodes*m*m), h and H (m*m); any output may be
 * NULL to skip. */
matsl_status matsl_problem_data(const matsl_problem* p, double* grid,
                                double* q_re, double* q_im, double* h_re,
                                double* h_im, double* bigh_re,
                                double* bigh_im);
void matsl_problem_free(matsl_problem* p);

/* ---- forward spectral problem ---- */
matsl_status matsl_forward(const matsl_problem* p, int n_max,
                           const matsl_options* o, matsl_spectral** out);

/* ---- spectral data ---- */
matsl_status matsl_spectral_from_text(const char* text, const matsl_options* o,
                                      matsl_spectral** out);
matsl_status matsl_spectral_to_text(const matsl_spectral* d, char** out);
matsl_status matsl_spectral_read(const char* path, const matsl_options* o,
                                 matsl_spectral** out);
matsl_status matsl_spectral_write(const matsl_spectral* d, const char* path);
matsl_status matsl_spectral_dims(const matsl_spectral* d, int* m, int* n_max);
/* omega_re/omega_im hold m entries each. */
matsl_status matsl_spectral_omega(const matsl_spectral* d, double* omega_re,
                                  double* omega_im);
/* Per-entry access, q is 1-based; alpha buffers are m*m row-major; any
 * output may be NULL to skip. */
matsl_status matsl_spectral_entry(const matsl_spectral* d, int n, int q,
                                  double* lambda_re, double* lambda_im,
                                  double* alpha_re, double* alpha_im,
                                  int* multiplicity, int* cluster_id);
/* Model data for the omega of an existing data set (same m / n_max). */
matsl_status matsl_spectral_model(const matsl_spectral* d,
                                  const matsl_options* o,
                                  matsl_spectral** out);
void matsl_spectral_free(matsl_spectral* d);

/* ---- inverse problem ---- */
/* grid_nodes uniform reconstruction nodes on [0, pi] (>= 5; 257 typical). */
matsl_status matsl_inverse(const matsl_spectral* d, int n_trunc,
                           int grid_nodes, const matsl_options* o,
                           matsl_result** out);
matsl_status matsl_result_problem(const matsl_result* r, matsl_problem** out);
matsl_status matsl_result_to_text(const matsl_result* r, char** out);
matsl_status matsl_result_write(const matsl_result* r, const char* path);
matsl_status matsl_result_stats(const matsl_result* r, double* omega_bound,
                                double* truncation_indicator,
                                double* max_residual, double* max_cond);
/* xi has capacity n_max+1; count returns the number written. */
matsl_status matsl_result_xi(const matsl_result* r, double* xi, int capacity,
                             int* count);
matsl_status matsl_result_warning_count(const matsl_result* r, int* count);
matsl_status matsl_result_warning(const matsl_result* r, int index, char** out);
void matsl_result_free(matsl_result* r);

/* ---- condition checks ---- */
/* conditions: comma-separated subset of "A,R,S,C"; n_bands applies to C
 * (pass -1 for n_max). */
matsl_status matsl_check_conditions(const matsl_spectral* d,
                                    const char* conditions, int n_bands,
                                    const matsl_options* o,
                                    matsl_report** out);
matsl_status matsl_check_structural(const matsl_problem* p,
                                    const matsl_spectral* d,
                                    const matsl_options* o,
                                    matsl_report** out);
/* verdict: 1 pass, 0 fail, -1 indeterminate. */
matsl_status matsl_report_verdict(const matsl_report* r, const char* condition,
                                  int* verdict);
matsl_status matsl_report_metric(const matsl_report* r, const char* condition,
                                 const char* key, double* value);
matsl_status matsl_report_passed(const matsl_report* r, int* all_passed);
matsl_status matsl_report_render(const matsl_report* r, char** out);
void matsl_report_free(matsl_report* r);

#ifdef __cplusplus
}
#endif

#endif /* MATSL_H */
