#ifndef WCS_WCS_H
#define WCS_WCS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(WCS_BUILDING_LIBRARY)
#    define WCS_API __declspec(dllexport)
#  else
#    define WCS_API __declspec(dllimport)
#  endif
#else
#  define WCS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wcs_status {
  WCS_OK = 0,
  WCS_ERR_INVALID_ARGUMENT = 1,
  WCS_ERR_DIMENSION_MISMATCH = 2,
  WCS_ERR_CAP_EXCEEDED = 3,
  WCS_ERR_INFEASIBLE = 4,
  WCS_ERR_NOT_CONVERGED = 5,
  WCS_ERR_IO = 6,
  WCS_ERR_PARSE = 7,
  WCS_ERR_PRECONDITION = 8,
  WCS_ERR_SCHEMA = 9,
  WCS_ERR_INTERNAL = 99
} wcs_status;

typedef enum wcs_model {
  WCS_MODEL_CARDINALITY = 0,
  WCS_MODEL_WEIGHTED_CARDINALITY = 1
} wcs_model;

typedef enum wcs_base {
  WCS_BASE_DFT = 0,
  WCS_BASE_DCT = 1
} wcs_base;

typedef enum wcs_report_status {
  WCS_REPORT_SATISFIED = 0,
  WCS_REPORT_VIOLATED = 1,
  WCS_REPORT_CERTIFIED_ON_KERNEL = 2,
  WCS_REPORT_UNDECIDED_OFF_KERNEL = 3
} wcs_report_status;

/* Opaque handles. */
typedef struct wcs_matrix wcs_matrix;
typedef struct wcs_weights wcs_weights;

/* Library version, e.g. "1.0.0". */
WCS_API const char* wcs_version(void);

/* Message of the last failed call on this thread ("" if none). */
WCS_API const char* wcs_last_error(void);

/* Matrices. Entry arrays are row-major; im may be NULL for real data. */
WCS_API wcs_status wcs_matrix_create(size_t m, size_t n, const double* re, const double* im, wcs_matrix** out);
WCS_API wcs_status wcs_matrix_read(const char* path, wcs_matrix** out);
WCS_API wcs_status wcs_matrix_write(const wcs_matrix* a, const char* path);
WCS_API wcs_status wcs_matrix_partial_unitary(wcs_base base, size_t n, size_t m, uint64_t seed,
                                              int exclude_first_row, wcs_matrix** out);
WCS_API wcs_status wcs_matrix_gaussian(size_t m, size_t n, uint64_t seed, int complex_entries, wcs_matrix** out);
WCS_API wcs_status wcs_matrix_dims(const wcs_matrix* a, size_t* m, size_t* n);
/* Copies entries out; im may be NULL. */
WCS_API wcs_status wcs_matrix_entries(const wcs_matrix* a, double* re, double* im);
WCS_API wcs_status wcs_matrix_scale(wcs_matrix* a, double c);
WCS_API void wcs_matrix_free(wcs_matrix* a);

/* Weights. */
WCS_API wcs_status wcs_weights_create(size_t n, const double* w, wcs_weights** out);
WCS_API wcs_status wcs_weights_size(const wcs_weights* w, size_t* n);
WCS_API void wcs_weights_free(wcs_weights* w);

/* sum_j w_j |x_j|; im may be NULL. */
WCS_API wcs_status wcs_weighted_l1_norm(const wcs_weights* w, const double* re, const double* im, double* out);

/* Best weighted s-term approximation: support (up to `support_cap` entries)
   and sigma = ||x_{S^c}||_{w,1}. */
WCS_API wcs_status wcs_best_s_term(const wcs_weights* w, wcs_model model, double s, const double* re,
                                   const double* im, size_t* support, size_t support_cap, size_t* support_len,
                                   double* sigma);

typedef struct wcs_cert_result {
  double constant;
  int satisfied;
  int exact;
  wcs_report_status status;
  size_t supports_examined;
  size_t kernel_dim;
} wcs_cert_result;

/* Certifiers. The attaining (or violating) support is copied to `support`
   when it is non-NULL. */
WCS_API wcs_status wcs_rip_constant(const wcs_matrix* a, const wcs_weights* w, wcs_model model, double s,
                                    wcs_cert_result* out, size_t* support, size_t support_cap,
                                    size_t* support_len);
WCS_API wcs_status wcs_nsp_constant(const wcs_matrix* a, const wcs_weights* w, wcs_model model, double s,
                                    wcs_cert_result* out, size_t* support, size_t support_cap,
                                    size_t* support_len);
WCS_API wcs_status wcs_robust_nsp(const wcs_matrix* a, const wcs_weights* w, double s, double rho, double gamma,
                                  wcs_cert_result* out);

typedef struct wcs_solve_info {
  double objective;
  double residual;
  double gap;
  size_t iterations;
  int converged;
  int zero_solution;
} wcs_solve_info;

/* min ||x||_{w,1} s.t. ||Ax - y||_2 <= eps (eps = 0: Ax = y). x arrays have
   length N; x_im may be NULL when only the real part is wanted. */
WCS_API wcs_status wcs_solve(const wcs_matrix* a, const double* y_re, const double* y_im, const wcs_weights* w,
                             double eps, double* x_re, double* x_im, wcs_solve_info* info);

/* Bounds. */
WCS_API wcs_status wcs_operator_norm_bound(double delta, size_t n_nu, double* out);
/* out = {A1, B1, A2, B2, nsp_bound} */
WCS_API wcs_status wcs_theorem37_constants(double delta_2s, double gamma_w, double out[5]);
/* out = {rho, gamma, D2} */
WCS_API wcs_status wcs_case1_constants(double delta_w3s, double out[3]);

/* Runs a CLI command ("certify", "recover", "construct", "experiment") on a
   JSON config file. out_dir may be NULL; workers 0 means the default;
   seed is used only when has_seed is nonzero. On WCS_OK, *report receives a
   JSON document to release with wcs_string_free and *exit_code the command's
   exit code. */
WCS_API wcs_status wcs_run_command(const char* command, const char* config_path, const char* out_dir,
                                   size_t workers, uint64_t seed, int has_seed, char** report, int* exit_code,
                                   char** message);
WCS_API void wcs_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* WCS_WCS_H */
