#include "wcs/wcs.h"

#include <cmath>
#include <cstring>
#include <new>
#include <string>

#include "wcs/bounds.hpp"
#include "wcs/certify.hpp"
#include "wcs/commands.hpp"
#include "wcs/construct.hpp"
#include "wcs/error.hpp"
#include "wcs/matrix_io.hpp"
#include "wcs/solver.hpp"

struct wcs_matrix {
  wcs::SenseMatrix m;
};

struct wcs_weights {
  wcs::WeightProfile w;
};

namespace {

thread_local std::string last_error;

wcs_status set_error(wcs_status s, const char* what) {
  last_error = what;
  return s;
}

template <typename F>
wcs_status guard(F&& f) {
  try {
    f();
    last_error.clear();
    return WCS_OK;
  } catch (const wcs::Error& e) {
    return set_error(static_cast<wcs_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(WCS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(WCS_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(WCS_ERR_INTERNAL, "unknown error");
  }
}

void need(const void* p, const char* name) {
  if (!p) wcs::fail(wcs::ErrorCode::InvalidArgument, std::string(name) + " must not be NULL");
}

wcs::SparseModel to_model(wcs_model m) {
  if (m == WCS_MODEL_CARDINALITY) return wcs::SparseModel::Cardinality;
  if (m == WCS_MODEL_WEIGHTED_CARDINALITY) return wcs::SparseModel::WeightedCardinality;
  wcs::fail(wcs::ErrorCode::InvalidArgument, "unknown sparse model");
}

wcs::CVector to_vector(std::size_t n, const double* re, const double* im) {
  need(re, "re");
  wcs::CVector v(static_cast<wcs::Index>(n));
  for (std::size_t i = 0; i < n; ++i) v(static_cast<wcs::Index>(i)) = {re[i], im ? im[i] : 0.0};
  return v;
}

wcs_report_status to_status(wcs::ReportStatus s) {
  switch (s) {
    case wcs::ReportStatus::Satisfied: return WCS_REPORT_SATISFIED;
    case wcs::ReportStatus::Violated: return WCS_REPORT_VIOLATED;
    case wcs::ReportStatus::CertifiedOnKernel: return WCS_REPORT_CERTIFIED_ON_KERNEL;
    case wcs::ReportStatus::UndecidedOffKernel: return WCS_REPORT_UNDECIDED_OFF_KERNEL;
  }
  return WCS_REPORT_VIOLATED;
}

void fill(const wcs::CertificationReport& r, wcs_cert_result* out, std::size_t* support, std::size_t cap,
          std::size_t* len) {
  out->constant = r.constant;
  out->satisfied = r.satisfied ? 1 : 0;
  out->exact = r.exact ? 1 : 0;
  out->status = to_status(r.status);
  out->supports_examined = r.supports_examined;
  out->kernel_dim = static_cast<std::size_t>(r.kernel_dim);
  if (len) *len = r.witness_support ? static_cast<std::size_t>(r.witness_support->size()) : 0;
  if (support && r.witness_support) {
    const auto& idx = r.witness_support->indices();
    for (std::size_t i = 0; i < idx.size() && i < cap; ++i) support[i] = static_cast<std::size_t>(idx[i]);
  }
}

char* dup(const std::string& s) {
  char* p = new char[s.size() + 1];
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

extern "C" {

const char* wcs_version(void) { return "1.0.0"; }

const char* wcs_last_error(void) { return last_error.c_str(); }

wcs_status wcs_matrix_create(size_t m, size_t n, const double* re, const double* im, wcs_matrix** out) {
  return guard([&] {
    need(re, "re");
    need(out, "out");
    if (m == 0 || n == 0) wcs::fail(wcs::ErrorCode::InvalidArgument, "matrix dimensions must be positive");
    wcs::CMatrix a(static_cast<wcs::Index>(m), static_cast<wcs::Index>(n));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        a(static_cast<wcs::Index>(i), static_cast<wcs::Index>(j)) = {re[i * n + j], im ? im[i * n + j] : 0.0};
    *out = new wcs_matrix{wcs::SenseMatrix(std::move(a))};
  });
}

wcs_status wcs_matrix_read(const char* path, wcs_matrix** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new wcs_matrix{wcs::read_matrix(std::filesystem::path(path))};
  });
}

wcs_status wcs_matrix_write(const wcs_matrix* a, const char* path) {
  return guard([&] {
    need(a, "matrix");
    need(path, "path");
    wcs::write_matrix(std::filesystem::path(path), a->m);
  });
}

wcs_status wcs_matrix_partial_unitary(wcs_base base, size_t n, size_t m, uint64_t seed, int exclude_first_row,
                                      wcs_matrix** out) {
  return guard([&] {
    need(out, "out");
    wcs::SamplingOptions so;
    so.exclude_first_row = exclude_first_row != 0;
    const auto nn = static_cast<wcs::Index>(n);
    const auto mm = static_cast<wcs::Index>(m);
    if (base == WCS_BASE_DFT) {
      *out = new wcs_matrix{wcs::sample_partial_dft(nn, mm, seed, so)};
    } else if (base == WCS_BASE_DCT) {
      *out = new wcs_matrix{wcs::sample_partial_dct(nn, mm, seed, so)};
    } else {
      wcs::fail(wcs::ErrorCode::InvalidArgument, "unknown base");
    }
  });
}

wcs_status wcs_matrix_gaussian(size_t m, size_t n, uint64_t seed, int complex_entries, wcs_matrix** out) {
  return guard([&] {
    need(out, "out");
    *out = new wcs_matrix{
        wcs::gaussian_matrix(static_cast<wcs::Index>(m), static_cast<wcs::Index>(n), seed, complex_entries != 0)};
  });
}

wcs_status wcs_matrix_dims(const wcs_matrix* a, size_t* m, size_t* n) {
  return guard([&] {
    need(a, "matrix");
    if (m) *m = static_cast<std::size_t>(a->m.rows());
    if (n) *n = static_cast<std::size_t>(a->m.cols());
  });
}

wcs_status wcs_matrix_entries(const wcs_matrix* a, double* re, double* im) {
  return guard([&] {
    need(a, "matrix");
    need(re, "re");
    const auto n = static_cast<std::size_t>(a->m.cols());
    for (wcs::Index i = 0; i < a->m.rows(); ++i)
      for (wcs::Index j = 0; j < a->m.cols(); ++j) {
        const std::size_t k = static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j);
        re[k] = a->m.values(i, j).real();
        if (im) im[k] = a->m.values(i, j).imag();
      }
  });
}

wcs_status wcs_matrix_scale(wcs_matrix* a, double c) {
  return guard([&] {
    need(a, "matrix");
    if (!std::isfinite(c)) wcs::fail(wcs::ErrorCode::InvalidArgument, "scale must be finite");
    a->m.values *= c;
  });
}

void wcs_matrix_free(wcs_matrix* a) { delete a; }

wcs_status wcs_weights_create(size_t n, const double* w, wcs_weights** out) {
  return guard([&] {
    need(w, "w");
    need(out, "out");
    *out = new wcs_weights{wcs::WeightProfile(std::vector<double>(w, w + n))};
  });
}

wcs_status wcs_weights_size(const wcs_weights* w, size_t* n) {
  return guard([&] {
    need(w, "weights");
    need(n, "n");
    *n = static_cast<std::size_t>(w->w.size());
  });
}

void wcs_weights_free(wcs_weights* w) { delete w; }

wcs_status wcs_weighted_l1_norm(const wcs_weights* w, const double* re, const double* im, double* out) {
  return guard([&] {
    need(w, "weights");
    need(out, "out");
    *out = wcs::weighted_l1_norm(to_vector(static_cast<std::size_t>(w->w.size()), re, im), w->w);
  });
}

wcs_status wcs_best_s_term(const wcs_weights* w, wcs_model model, double s, const double* re, const double* im,
                           size_t* support, size_t support_cap, size_t* support_len, double* sigma) {
  return guard([&] {
    need(w, "weights");
    const wcs::BestTerm bt = wcs::best_weighted_s_term(to_vector(static_cast<std::size_t>(w->w.size()), re, im),
                                                       w->w, to_model(model), s);
    if (sigma) *sigma = bt.sigma;
    if (support_len) *support_len = static_cast<std::size_t>(bt.support.size());
    if (support) {
      const auto& idx = bt.support.indices();
      for (std::size_t i = 0; i < idx.size() && i < support_cap; ++i) support[i] = static_cast<std::size_t>(idx[i]);
    }
  });
}

wcs_status wcs_rip_constant(const wcs_matrix* a, const wcs_weights* w, wcs_model model, double s,
                            wcs_cert_result* out, size_t* support, size_t support_cap, size_t* support_len) {
  return guard([&] {
    need(a, "matrix");
    need(w, "weights");
    need(out, "out");
    fill(wcs::rip_constant(a->m.values, w->w, to_model(model), s), out, support, support_cap, support_len);
  });
}

wcs_status wcs_nsp_constant(const wcs_matrix* a, const wcs_weights* w, wcs_model model, double s,
                            wcs_cert_result* out, size_t* support, size_t support_cap, size_t* support_len) {
  return guard([&] {
    need(a, "matrix");
    need(w, "weights");
    need(out, "out");
    fill(wcs::nsp_constant(a->m.values, w->w, to_model(model), s), out, support, support_cap, support_len);
  });
}

wcs_status wcs_robust_nsp(const wcs_matrix* a, const wcs_weights* w, double s, double rho, double gamma,
                          wcs_cert_result* out) {
  return guard([&] {
    need(a, "matrix");
    need(w, "weights");
    need(out, "out");
    fill(wcs::check_robust_nsp_kernel(a->m.values, w->w, s, rho, gamma), out, nullptr, 0, nullptr);
  });
}

wcs_status wcs_solve(const wcs_matrix* a, const double* y_re, const double* y_im, const wcs_weights* w, double eps,
                     double* x_re, double* x_im, wcs_solve_info* info) {
  return guard([&] {
    need(a, "matrix");
    need(w, "weights");
    need(x_re, "x_re");
    const wcs::CVector y = to_vector(static_cast<std::size_t>(a->m.rows()), y_re, y_im);
    const wcs::SolverOutcome o = wcs::solve_weighted_bpdn(a->m.values, y, w->w, eps);
    for (wcs::Index i = 0; i < o.x.size(); ++i) {
      x_re[i] = o.x(i).real();
      if (x_im) x_im[i] = o.x(i).imag();
    }
    if (info) {
      info->objective = o.objective;
      info->residual = o.residual;
      info->gap = o.gap;
      info->iterations = static_cast<std::size_t>(o.iterations);
      info->converged = o.converged ? 1 : 0;
      info->zero_solution = o.zero_solution ? 1 : 0;
    }
  });
}

wcs_status wcs_operator_norm_bound(double delta, size_t n_nu, double* out) {
  return guard([&] {
    need(out, "out");
    *out = wcs::operator_norm_bound(delta, static_cast<wcs::Index>(n_nu));
  });
}

wcs_status wcs_theorem37_constants(double delta_2s, double gamma_w, double out[5]) {
  return guard([&] {
    need(out, "out");
    const wcs::Theorem37Constants c = wcs::theorem37_constants(delta_2s, gamma_w);
    out[0] = c.a1;
    out[1] = c.b1;
    out[2] = c.a2;
    out[3] = c.b2;
    out[4] = c.nsp_bound;
  });
}

wcs_status wcs_case1_constants(double delta_w3s, double out[3]) {
  return guard([&] {
    need(out, "out");
    const wcs::Case1Constants c = wcs::case1_constants(delta_w3s);
    out[0] = c.rho;
    out[1] = c.gamma;
    out[2] = c.d2;
  });
}

wcs_status wcs_run_command(const char* command, const char* config_path, const char* out_dir, size_t workers,
                           uint64_t seed, int has_seed, char** report, int* exit_code, char** message) {
  return guard([&] {
    need(command, "command");
    need(config_path, "config_path");
    need(report, "report");
    need(exit_code, "exit_code");
    wcs::CommandOptions o;
    if (out_dir) o.out_dir = std::filesystem::path(out_dir);
    if (workers > 0) o.workers = static_cast<wcs::Index>(workers);
    if (has_seed) o.seed = seed;
    const wcs::CommandResult r = wcs::run_command_file(command, config_path, o);
    *report = dup(r.json);
    *exit_code = r.exit_code;
    if (message) *message = r.message.empty() ? nullptr : dup(r.message);
  });
}

void wcs_string_free(char* s) { delete[] s; }

}  // extern "C"
