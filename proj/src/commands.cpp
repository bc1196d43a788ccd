#include "wcs/commands.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "wcs/bounds.hpp"
#include "wcs/certify.hpp"
#include "wcs/construct.hpp"
#include "wcs/error.hpp"
#include "wcs/matrix_io.hpp"
#include "wcs/rng.hpp"
#include "wcs/solver.hpp"

namespace wcs {

namespace {

using json = nlohmann::ordered_json;
using cd = std::complex<double>;
namespace fs = std::filesystem;

[[noreturn]] void schema(const std::string& what) { fail(ErrorCode::Schema, "config: " + what); }

// JSON object reader that remembers which keys were consumed so leftovers
// can be rejected.
class Cfg {
public:
  Cfg(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) schema(where_ + " must be an object");
  }

  const std::string& where() const { return where_; }

  bool has(const std::string& k) {
    used_.insert(k);
    return j_.contains(k);
  }

  const json& raw(const std::string& k) {
    if (!has(k)) schema("missing key '" + path(k) + "'");
    return j_.at(k);
  }

  double num(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_number()) schema("'" + path(k) + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) schema("'" + path(k) + "' must be finite");
    return d;
  }
  double num(const std::string& k, double def) { return has(k) ? num(k) : def; }

  Index integer(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_number_integer()) schema("'" + path(k) + "' must be an integer");
    return static_cast<Index>(v.get<long long>());
  }
  Index integer(const std::string& k, Index def) { return has(k) ? integer(k) : def; }

  std::uint64_t u64(const std::string& k, std::uint64_t def) {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
    schema("'" + path(k) + "' must be a nonnegative integer");
  }

  bool flag(const std::string& k, bool def) {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_boolean()) schema("'" + path(k) + "' must be true or false");
    return v.get<bool>();
  }

  std::string str(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_string()) schema("'" + path(k) + "' must be a string");
    return v.get<std::string>();
  }
  std::string str(const std::string& k, const std::string& def) { return has(k) ? str(k) : def; }

  std::vector<double> nums(const std::string& k) {
    const json& v = raw(k);
    std::vector<double> out;
    if (v.is_number()) {
      out.push_back(v.get<double>());
    } else if (v.is_array()) {
      for (const auto& e : v) {
        if (!e.is_number()) schema("'" + path(k) + "' must hold numbers");
        out.push_back(e.get<double>());
      }
    } else {
      schema("'" + path(k) + "' must be a number or an array of numbers");
    }
    for (double d : out)
      if (!std::isfinite(d)) schema("'" + path(k) + "' must be finite");
    if (out.empty()) schema("'" + path(k) + "' must not be empty");
    return out;
  }
  std::vector<double> nums(const std::string& k, std::vector<double> def) { return has(k) ? nums(k) : def; }

  std::vector<Index> ints(const std::string& k) {
    const json& v = raw(k);
    std::vector<Index> out;
    if (v.is_number_integer()) {
      out.push_back(static_cast<Index>(v.get<long long>()));
    } else if (v.is_array()) {
      for (const auto& e : v) {
        if (!e.is_number_integer()) schema("'" + path(k) + "' must hold integers");
        out.push_back(static_cast<Index>(e.get<long long>()));
      }
    } else {
      schema("'" + path(k) + "' must be an integer or an array of integers");
    }
    return out;
  }

  Cfg obj(const std::string& k) { return Cfg(raw(k), path(k)); }

  void done() const {
    for (const auto& item : j_.items())
      if (!used_.count(item.key())) schema("unknown key '" + path(item.key()) + "'");
  }

private:
  std::string path(const std::string& k) const { return where_.empty() ? k : where_ + "." + k; }

  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

struct Ctx {
  fs::path base_dir;
  std::optional<fs::path> out_dir;
  Index workers = 1;
  std::uint64_t seed = 0;
  std::string command;
};

fs::path resolve(const Ctx& ctx, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : ctx.base_dir / path;
}

json jnum(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json jsupport(const Support& s) {
  json a = json::array();
  for (Index i : s) a.push_back(i);
  return a;
}

json jvector(const CVector& v) {
  const bool real = is_real(CMatrix(v));
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) {
    if (real) {
      a.push_back(jnum(v(i).real()));
    } else {
      a.push_back(format_entry(v(i), false));
    }
  }
  return a;
}

std::string csv_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

cd entry_of(const json& e, const std::string& where) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_string()) {
    cd z;
    if (parse_entry(e.get<std::string>(), true, z)) return z;
  }
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return {e[0].get<double>(), e[1].get<double>()};
  schema("'" + where + "' holds an entry that is neither a number, \"re+imj\" nor [re, im]");
}

// ---------------------------------------------------------------- inputs

SenseMatrix load_matrix(Cfg c, const Ctx& ctx) {
  SenseMatrix a;
  if (c.has("file")) {
    a = read_matrix(resolve(ctx, c.str("file")));
  } else if (c.has("rows")) {
    const json& rows = c.raw("rows");
    if (!rows.is_array() || rows.empty()) schema("'" + c.where() + ".rows' must be a nonempty array of rows");
    const Index m = static_cast<Index>(rows.size());
    const Index n = rows[0].is_array() ? static_cast<Index>(rows[0].size()) : 0;
    if (n == 0) schema("'" + c.where() + ".rows' must hold nonempty arrays");
    CMatrix v(m, n);
    for (Index i = 0; i < m; ++i) {
      const json& r = rows[static_cast<std::size_t>(i)];
      if (!r.is_array() || static_cast<Index>(r.size()) != n) schema("'" + c.where() + ".rows' is ragged");
      for (Index j = 0; j < n; ++j) v(i, j) = entry_of(r[static_cast<std::size_t>(j)], c.where() + ".rows");
    }
    a = SenseMatrix(std::move(v));
  } else {
    const std::string gen = c.str("generator");
    if (gen == "identity") {
      const Index n = c.integer("n");
      if (n < 1) schema("'" + c.where() + ".n' must be positive");
      Provenance p;
      p.source = MatrixSource::Identity;
      a = SenseMatrix(CMatrix::Identity(n, n), p);
    } else if (gen == "dft" || gen == "dct") {
      const Index n = c.integer("n");
      const Index m = c.integer("m", n);
      SamplingOptions so;
      so.exclude_first_row = c.flag("exclude_first_row", false);
      so.with_replacement = c.flag("with_replacement", false);
      const std::uint64_t seed = c.u64("seed", ctx.seed);
      a = gen == "dft" ? sample_partial_dft(n, m, seed, so) : sample_partial_dct(n, m, seed, so);
    } else if (gen == "gaussian") {
      const Index m = c.integer("m");
      const Index n = c.integer("n");
      a = gaussian_matrix(m, n, c.u64("seed", ctx.seed), c.flag("complex", false));
    } else {
      schema("unknown generator '" + gen + "' (identity, dft, dct, gaussian)");
    }
  }
  const double scale = c.num("scale", 1.0);
  if (scale != 1.0) {
    a.values *= scale;
    a.provenance.note += (a.provenance.note.empty() ? "" : ", ") + std::string("scaled by ") + csv_num(scale);
  }
  c.done();
  return a;
}

CVector load_vector(const json& j, const std::string& where, const Ctx& ctx) {
  if (j.is_array()) {
    CVector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = entry_of(j[i], where);
    if (v.size() == 0) schema("'" + where + "' must not be empty");
    return v;
  }
  Cfg c(j, where);
  const CVector v = read_vector(resolve(ctx, c.str("file")));
  c.done();
  return v;
}

WeightProfile load_weights(Cfg& root, Index n, const Ctx& ctx, const std::string& key = "weights") {
  if (!root.has(key)) return WeightProfile::uniform(n, 1.0);
  const json& j = root.raw(key);
  const std::string where = root.where().empty() ? key : root.where() + "." + key;
  std::vector<double> w;
  if (j.is_number()) {
    w.assign(static_cast<std::size_t>(n), j.get<double>());
  } else if (j.is_array()) {
    for (const auto& e : j) {
      if (!e.is_number()) schema("'" + where + "' must hold numbers");
      w.push_back(e.get<double>());
    }
  } else {
    Cfg c(j, where);
    if (c.has("uniform")) {
      w.assign(static_cast<std::size_t>(n), c.num("uniform"));
    } else if (c.has("file")) {
      const CVector v = read_vector(resolve(ctx, c.str("file")));
      for (Index i = 0; i < v.size(); ++i) {
        if (v(i).imag() != 0.0) schema("'" + where + ".file' holds complex weights");
        w.push_back(v(i).real());
      }
    } else if (c.has("random")) {
      const std::vector<double> r = c.nums("random");
      if (r.size() != 2 || !(r[0] > 0.0) || r[1] < r[0]) schema("'" + where + ".random' must be [low, high] with 0 < low <= high");
      Rng rng(c.u64("seed", mix_seed(ctx.seed, 0x77)));
      for (Index i = 0; i < n; ++i) w.push_back(rng.uniform(r[0], r[1]));
    } else {
      schema("'" + where + "' needs one of uniform, file, random");
    }
    c.done();
  }
  if (static_cast<Index>(w.size()) != n)
    fail(ErrorCode::DimensionMismatch, where + " has " + std::to_string(w.size()) + " entries for N = " + std::to_string(n));
  return WeightProfile(std::move(w));
}

CertifyOptions load_certify_options(Cfg& root, const Ctx& ctx) {
  CertifyOptions co;
  co.workers = ctx.workers;
  co.seed = ctx.seed;
  if (root.has("certify")) {
    Cfg c = root.obj("certify");
    co.margin = c.num("margin", co.margin);
    co.random_starts = c.integer("random_starts", co.random_starts);
    co.ascent_iterations = c.integer("ascent_iterations", co.ascent_iterations);
    co.circuit_seeds = c.integer("circuit_seeds", co.circuit_seeds);
    c.done();
  }
  return co;
}

SolverOptions load_solver_options(Cfg& root) {
  SolverOptions so;
  if (root.has("solver")) {
    Cfg c = root.obj("solver");
    so.feasibility_tol = c.num("feasibility_tol", so.feasibility_tol);
    so.objective_tol = c.num("objective_tol", so.objective_tol);
    so.max_iterations = c.integer("max_iterations", so.max_iterations);
    so.check_every = c.integer("check_every", so.check_every);
    so.polish = c.flag("polish", so.polish);
    c.done();
  }
  return so;
}

json provenance_json(const Provenance& p) {
  json j;
  j["source"] = std::string(to_string(p.source));
  if (p.seed) j["seed"] = *p.seed;
  if (!p.rows.empty()) j["rows"] = p.rows;
  if (!p.note.empty()) j["note"] = p.note;
  return j;
}

json report_json(const CertificationReport& r) {
  json j;
  j["property"] = std::string(to_string(r.property));
  j["order"] = r.order;
  j["model"] = std::string(to_string(r.model));
  j["constant"] = jnum(r.constant);
  j["threshold"] = jnum(r.threshold);
  j["satisfied"] = r.satisfied;
  j["status"] = std::string(to_string(r.status));
  j["exact"] = r.exact;
  j["kernel_dim"] = r.kernel_dim;
  j["supports_examined"] = r.supports_examined;
  j["candidates_examined"] = r.candidates_examined;
  if (r.property == Property::RIP) {
    j["sigma_max_sq"] = jnum(r.sigma_max_sq);
    j["sigma_min_sq"] = jnum(r.sigma_min_sq);
  }
  if (r.property == Property::RobustNSP) {
    j["rho"] = jnum(r.rho);
    j["gamma"] = jnum(r.gamma);
    j["off_kernel_best"] = jnum(r.off_kernel_best);
  }
  if (r.witness_support) j["attaining_support"] = jsupport(*r.witness_support);
  if (!r.satisfied) {
    json w;
    if (r.witness_support) w["support"] = jsupport(*r.witness_support);
    w["vector"] = jvector(r.witness_vector);
    w["in_kernel"] = r.witness_in_kernel;
    j["witness"] = w;
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  os << j.dump(2) << '\n';
  if (!os) fail(ErrorCode::Io, "write to '" + path.string() + "' failed");
}

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) fail(ErrorCode::Io, "cannot create directory '" + p.string() + "': " + ec.message());
}

// ---------------------------------------------------------------- certify

json cmd_certify(Cfg& root, const Ctx& ctx, int& exit_code) {
  const SenseMatrix a = load_matrix(root.obj("matrix"), ctx);
  const WeightProfile w = load_weights(root, a.cols(), ctx);
  const SparseModel model = parse_model(root.str("model", "cardinality"));
  const double s = root.num("s");
  const Property prop = parse_property(root.str("property"));
  const CertifyOptions co = load_certify_options(root, ctx);

  CertificationReport rep;
  switch (prop) {
    case Property::RIP: rep = rip_constant(a.values, w, model, s, co, root.num("delta_bound", 1.0)); break;
    case Property::NSP: rep = nsp_constant(a.values, w, model, s, co); break;
    case Property::RobustNSP:
      if (model != SparseModel::WeightedCardinality) schema("robust_nsp requires model weighted_cardinality");
      rep = check_robust_nsp_kernel(a.values, w, s, root.num("rho"), root.num("gamma"), co);
      break;
  }
  exit_code = rep.satisfied ? 0 : 2;
  json j = report_json(rep);
  j["matrix"] = {{"rows", a.rows()}, {"cols", a.cols()}, {"provenance", provenance_json(a.provenance)}};
  if (ctx.out_dir) {
    ensure_dir(*ctx.out_dir);
    write_json(*ctx.out_dir / "report.json", j);
  }
  return j;
}

// ---------------------------------------------------------------- recover

json cmd_recover(Cfg& root, const Ctx& ctx, int& exit_code) {
  const SenseMatrix a = load_matrix(root.obj("matrix"), ctx);
  const Index n = a.cols();
  const WeightProfile w = load_weights(root, n, ctx);
  const double eps = root.num("epsilon", 0.0);
  const SolverOptions so = load_solver_options(root);

  std::optional<CVector> x_true;
  CVector y;
  if (root.has("planted")) {
    if (root.has("y")) schema("give either 'y' or 'planted', not both");
    Cfg p = root.obj("planted");
    Rng rng(p.u64("seed", mix_seed(ctx.seed, 0x91)));
    CVector x = CVector::Zero(n);
    const std::vector<Index> supp = p.ints("support");
    std::optional<CVector> vals;
    if (p.has("values")) vals = load_vector(p.raw("values"), p.where() + ".values", ctx);
    if (vals && vals->size() != static_cast<Index>(supp.size())) schema("'planted.values' must match 'planted.support'");
    for (std::size_t i = 0; i < supp.size(); ++i) {
      if (supp[i] < 0 || supp[i] >= n) schema("'planted.support' index out of range");
      x(supp[i]) = vals ? (*vals)(static_cast<Index>(i)) : cd(rng.normal(), 0.0);
    }
    const double noise = p.num("noise", 0.0);
    if (noise < 0.0) schema("'planted.noise' must be nonnegative");
    p.done();
    y = a.values * x;
    if (noise > 0.0) {
      CVector e(a.rows());
      for (Index i = 0; i < e.size(); ++i) e(i) = cd(rng.normal(), is_real(a.values) ? 0.0 : rng.normal());
      y += e * (noise / e.norm());
    }
    x_true = x;
  } else {
    y = load_vector(root.raw("y"), "y", ctx);
  }
  if (root.has("x_true")) {
    if (x_true) schema("'x_true' is implied by 'planted'");
    x_true = load_vector(root.raw("x_true"), "x_true", ctx);
    if (x_true->size() != n) fail(ErrorCode::DimensionMismatch, "x_true length differs from N");
  }

  const SolverOutcome out = solve_weighted_bpdn(a.values, y, w, eps, so);
  exit_code = out.converged ? 0 : 2;
  json j;
  j["epsilon"] = eps;
  j["objective"] = jnum(out.objective);
  j["residual"] = jnum(out.residual);
  j["dual_bound"] = jnum(out.dual_bound);
  j["gap"] = jnum(out.gap);
  j["iterations"] = out.iterations;
  j["converged"] = out.converged;
  j["zero_solution"] = out.zero_solution;
  j["polished"] = out.polished;
  if (x_true) {
    j["recovery_error"] = jnum((out.x - *x_true).norm());
    const double xn = x_true->norm();
    j["relative_error"] = xn > 0.0 ? jnum((out.x - *x_true).norm() / xn) : json(nullptr);
  }
  j["x"] = jvector(out.x);
  if (ctx.out_dir) {
    ensure_dir(*ctx.out_dir);
    write_vector(*ctx.out_dir / "solution.wcsmat", out.x, "weighted l1 solution");
    write_json(*ctx.out_dir / "report.json", j);
  }
  return j;
}

// ---------------------------------------------------------------- construct

struct Checks {
  json list = json::array();
  bool all_pass = true;

  void add(const std::string& name, double value, double tol, bool pass, bool applicable = true) {
    json c;
    c["name"] = name;
    c["value"] = jnum(value);
    c["tolerance"] = jnum(tol);
    c["applicable"] = applicable;
    c["pass"] = applicable ? json(pass) : json(nullptr);
    list.push_back(c);
    if (applicable && !pass) all_pass = false;
  }
  void below(const std::string& name, double value, double tol) { add(name, value, tol, value <= tol); }
};

json counterexample_json(const CounterexampleBundle& b, const CounterexampleNspCheck* v, Checks& checks) {
  const auto& d = b.diagnostics;
  checks.below("rows_orthonormal", d.rows_orthonormal_error, 1e-10);
  checks.below("d_in_kernel", d.d_kernel_residual, 1e-9);
  checks.below("phi1_orthogonal_to_d", d.phi1_d_inner, 1e-10);
  checks.below("phi1_unit_norm", d.phi1_norm_error, 1e-10);
  checks.below("phi1_is_first_row", d.phi1_row_error, 1e-10);
  checks.below("xhat_closed_form", d.xhat_closed_form_error, 1e-9 * std::max(1.0, b.alpha));
  checks.below("rho_residual_relative", d.rho_residual_rel_error, 1e-8);
  checks.add("kernel_dim", static_cast<double>(d.kernel_dim), static_cast<double>(d.kernel_dim_expected),
             d.kernel_dim == d.kernel_dim_expected);
  checks.add("ne_dim", static_cast<double>(d.ne_dim), static_cast<double>(d.ne_dim_expected),
             d.ne_dim == d.ne_dim_expected);
  checks.add("norm_inequality", d.xhat_weighted_norm - d.x0_weighted_norm, 0.0, d.norm_inequality_holds,
             d.norm_condition_applies);
  checks.add("alpha_bracket", b.alpha, 0.0, d.alpha_in_bracket);
  checks.add("error_lower_bound", d.error_sq - d.lower_bound, 0.0, d.lower_bound_holds);
  if (v) checks.add("nsp_of_phi", v->exact ? v->exact->constant : v->max_sampled_ratio, 1.0, v->nsp_holds);

  json j;
  j["model"] = std::string(to_string(b.model));
  j["s"] = b.s;
  j["m"] = b.m;
  j["n"] = b.n;
  j["k"] = b.k;
  j["alpha"] = jnum(b.alpha);
  j["phi_normalizer"] = jnum(b.phi_normalizer);
  json dj;
  dj["xhat_weighted_norm"] = jnum(d.xhat_weighted_norm);
  dj["x0_weighted_norm"] = jnum(d.x0_weighted_norm);
  dj["norm_condition_applies"] = d.norm_condition_applies;
  dj["alpha_lower"] = jnum(d.alpha_lower);
  dj["alpha_upper"] = jnum(d.alpha_upper);
  dj["error_sq"] = jnum(d.error_sq);
  dj["lower_bound"] = jnum(d.lower_bound);
  dj["c_prime"] = d.c_prime ? jnum(*d.c_prime) : json(nullptr);
  dj["upper_bound"] = d.upper_bound ? jnum(*d.upper_bound) : json(nullptr);
  dj["bounds_contradict"] = d.bounds_contradict;
  dj["premises"] = {{"sparsity", d.premise_sparsity},
                    {"dimension", d.premise_dimension},
                    {"rows", d.premise_rows},
                    {"weights", d.premise_weights},
                    {"sample_complexity", "unverifiable"}};
  dj["inner_nsp"] = {{"status", d.inner_nsp.status},
                     {"gamma", jnum(d.inner_nsp.gamma)},
                     {"target", jnum(d.inner_nsp.target)},
                     {"resamples", d.inner_nsp.resamples}};
  j["diagnostics"] = dj;
  if (v) {
    json vj;
    vj["mode"] = v->mode;
    if (v->exact) vj["exact"] = report_json(*v->exact);
    vj["samples"] = v->samples;
    vj["max_sampled_ratio"] = jnum(v->max_sampled_ratio);
    vj["d_i_norm"] = jnum(v->d_i_norm);
    vj["half_d_ic_sum"] = jnum(v->half_d_ic_sum);
    vj["key_inequality"] = v->key_inequality;
    vj["nsp_holds"] = v->nsp_holds;
    j["nsp_verification"] = vj;
  }
  return j;
}

json cmd_construct(Cfg& root, const Ctx& ctx, int& exit_code) {
  const std::string kind = root.str("kind");
  Checks checks;
  json j;
  j["kind"] = kind;
  std::vector<std::pair<std::string, SenseMatrix>> files;

  if (kind == "partial_unitary") {
    const std::string base = root.str("base", "dft");
    const Index n = root.integer("n");
    const Index m = root.integer("m");
    SamplingOptions so;
    so.exclude_first_row = root.flag("exclude_first_row", false);
    so.with_replacement = root.flag("with_replacement", false);
    const std::uint64_t seed = ctx.seed;
    SenseMatrix a;
    if (base == "dft") {
      a = sample_partial_dft(n, m, seed, so);
    } else if (base == "dct") {
      a = sample_partial_dct(n, m, seed, so);
    } else {
      const SenseMatrix u = read_matrix(resolve(ctx, base));
      a = sample_partial_unitary(u.values, m, seed, so);
    }
    const CMatrix g = a.values * a.values.adjoint() * (static_cast<double>(m) / static_cast<double>(n));
    checks.add("rows_orthogonal", (g - CMatrix::Identity(m, m)).cwiseAbs().maxCoeff(), 1e-10,
               (g - CMatrix::Identity(m, m)).cwiseAbs().maxCoeff() <= 1e-10, !so.with_replacement);
    const double ones = (a.values * CVector::Ones(n)).norm();
    checks.add("ones_in_kernel", ones, 1e-10, ones <= 1e-10, so.exclude_first_row);
    j["matrix"] = {{"rows", a.rows()}, {"cols", a.cols()}, {"provenance", provenance_json(a.provenance)}};
    files.emplace_back("matrix.wcsmat", std::move(a));
  } else if (kind == "gaussian") {
    SenseMatrix a = gaussian_matrix(root.integer("m"), root.integer("n"), ctx.seed, root.flag("complex", false));
    j["matrix"] = {{"rows", a.rows()}, {"cols", a.cols()}, {"provenance", provenance_json(a.provenance)}};
    files.emplace_back("matrix.wcsmat", std::move(a));
  } else if (kind == "counterexample") {
    const Index n = root.integer("n");
    const Index m = root.integer("m");
    const SparseModel model = parse_model(root.str("model", "weighted_cardinality"));
    const double s = root.num("s");
    const WeightProfile w = load_weights(root, n, ctx);
    CounterexampleOptions co;
    const std::string base = root.str("inner_base", "dft");
    if (base == "dft") {
      co.base = InnerBase::DFT;
    } else if (base == "dct") {
      co.base = InnerBase::DCT;
    } else {
      co.inner_unitary = read_matrix(resolve(ctx, base)).values;
    }
    co.certify_inner = root.flag("certify_inner", true);
    co.max_resamples = root.integer("max_resamples", co.max_resamples);
    co.hypothetical_delta = root.num("hypothetical_delta", 0.0);
    co.certify = load_certify_options(root, ctx);
    const bool verify = root.flag("verify", true);
    const Index samples = root.integer("verify_samples", 200);
    const bool force_sampled = root.flag("force_sampled", false);

    const CounterexampleBundle b = build_counterexample(w, s, m, n, model, ctx.seed, co);
    std::optional<CounterexampleNspCheck> v;
    if (verify) v = verify_nsp_of_counterexample(b, samples, mix_seed(ctx.seed, 0xce), force_sampled, co.certify);
    j["counterexample"] = counterexample_json(b, v ? &*v : nullptr, checks);
    files.emplace_back("phi.wcsmat", b.phi);
    files.emplace_back("inner.wcsmat", b.inner);
    for (const auto& [name, vec] : {std::pair<const char*, const CVector*>{"d.wcsmat", &b.d},
                                    {"phi1.wcsmat", &b.phi1},
                                    {"x0.wcsmat", &b.x0},
                                    {"xhat.wcsmat", &b.xhat},
                                    {"y.wcsmat", &b.y}}) {
      Provenance p;
      p.source = MatrixSource::Counterexample;
      p.seed = ctx.seed;
      files.emplace_back(name, SenseMatrix(CMatrix(*vec), p));
    }
  } else if (kind == "shrink") {
    const SenseMatrix psi = load_matrix(root.obj("matrix"), ctx);
    const WeightProfile w = load_weights(root, psi.cols(), ctx);
    const double s = root.num("s");
    const double rho = root.num("rho");
    const double gamma = root.num("gamma");
    CVector x = CVector::Zero(psi.cols());
    if (root.has("witness")) {
      x = load_vector(root.raw("witness"), "witness", ctx);
    } else {
      x(0) = 1.0;
    }
    const double fraction = root.num("fraction", 0.5);
    const ShrinkResult r = shrink_to_break_robust_nsp(psi.values, w, s, rho, gamma, x, fraction);
    checks.add("replay_violates", r.slack_scaled, 0.0, r.replay_violates);
    j["shrink"] = {{"c", jnum(r.c)},
                   {"c_max", jnum(r.c_max)},
                   {"support", jsupport(r.support)},
                   {"margin", jnum(r.margin)},
                   {"slack_original", jnum(r.slack_original)},
                   {"slack_scaled", jnum(r.slack_scaled)}};
    Provenance p = psi.provenance;
    p.source = MatrixSource::Derived;
    p.note = "scaled by " + csv_num(r.c);
    files.emplace_back("scaled.wcsmat", SenseMatrix(r.scaled, p));
  } else {
    schema("unknown construct kind '" + kind + "' (partial_unitary, gaussian, counterexample, shrink)");
  }

  j["seed"] = ctx.seed;
  j["checks"] = checks.list;
  j["all_checks_pass"] = checks.all_pass;
  json names = json::array();
  for (const auto& f : files) names.push_back(f.first);
  j["files"] = ctx.out_dir ? names : json::array();
  if (ctx.out_dir) {
    ensure_dir(*ctx.out_dir);
    for (const auto& [name, mat] : files) write_matrix(*ctx.out_dir / name, mat);
    write_json(*ctx.out_dir / "manifest.json", j);
  }
  exit_code = checks.all_pass ? 0 : 2;
  return j;
}

// ---------------------------------------------------------------- experiments

using Row = std::vector<std::string>;

struct Table {
  std::vector<std::string> header;
  std::size_t pass_col = 0;
};

struct SweepResult {
  std::vector<std::vector<Row>> rows;  ///< per completed trial
  Index completed = 0;                 ///< trials [start, start + completed) finished
  bool complete = true;
};

// Trials run on a worker pool; results are merged in trial order and only the
// contiguous prefix of finished trials is kept.
template <typename F>
SweepResult run_sweep(Index start, Index trials, Index workers, double budget_s, F&& trial_fn) {
  const Index count = std::max<Index>(0, trials - start);
  std::vector<std::optional<std::vector<Row>>> slots(static_cast<std::size_t>(count));
  std::atomic<Index> next{0};
  std::atomic<bool> out_of_time{false};
  std::mutex err_mu;
  std::exception_ptr err;
  const auto t0 = std::chrono::steady_clock::now();

  auto work = [&] {
    for (;;) {
      if (out_of_time.load()) return;
      {
        std::lock_guard<std::mutex> lk(err_mu);
        if (err) return;
      }
      if (budget_s > 0.0 &&
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() > budget_s) {
        out_of_time = true;
        return;
      }
      const Index i = next.fetch_add(1);
      if (i >= count) return;
      try {
        slots[static_cast<std::size_t>(i)] = trial_fn(start + i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  const Index nw = std::max<Index>(1, std::min(workers, count));
  std::vector<std::thread> pool;
  for (Index t = 1; t < nw; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);

  SweepResult r;
  for (auto& s : slots) {
    if (!s) break;
    r.rows.push_back(std::move(*s));
    ++r.completed;
  }
  r.complete = r.completed == count;
  return r;
}

std::string fnv_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string join_csv(const Row& r) {
  std::string s;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i) s += ',';
    s += r[i];
  }
  return s;
}

std::string b01(bool b) { return b ? "1" : "0"; }

// Weighted Cardinality at s needs s >= 2 max w^2; both models use the standing assumption.
std::vector<double> random_weights(Rng& rng, Index n, double lo, double hi) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (double& v : w) v = rng.uniform(lo, hi);
  return w;
}

Table equivalence_table() {
  return {{"trial", "model", "m", "n", "s", "gamma", "exact", "nsp_holds", "supports_tested", "vectors_tested",
           "recovered", "max_rel_error", "competitor_found", "pass", "note"},
          13};
}

Table bound_table() {
  return {{"trial", "m", "n", "s", "gamma_w", "delta_2s", "premise", "nsp_constant", "nsp_bound", "nsp_ok", "noise",
           "sigma_s", "error", "bound", "budget_l2", "pass", "note"},
          15};
}

Table scaling_table() {
  return {{"trial", "kind", "c", "delta", "delta_scaled", "predicted_break", "rip_broken", "nsp", "nsp_scaled",
           "nsp_diff", "replay_violates", "pass", "note"},
          11};
}

json cmd_experiment(Cfg& root, const json& config, const Ctx& ctx, int& exit_code, std::string& message,
                    json& telemetry) {
  const std::string name = root.str("experiment");
  const Index trials = root.integer("trials", 30);
  if (trials < 1) schema("'trials' must be positive");
  const double budget = root.num("time_budget_s", 0.0);
  const std::string token = root.str("resume_token", "");

  Table table;
  std::function<std::vector<Row>(Index)> trial_fn;

  if (name == "equivalence") {
    table = equivalence_table();
    const Index m = root.integer("m", 6);
    const Index n = root.integer("n", 12);
    const std::string model_s = root.str("model", "both");
    const double s = root.num("s", 2.0);
    const std::vector<double> wr = root.nums("weight_range", {0.7, 1.3});
    const Index plants = root.integer("plants_per_support", 1);
    if (wr.size() != 2 || !(wr[0] > 0.0) || wr[1] < wr[0]) schema("'weight_range' must be [low, high]");
    if (model_s != "both") parse_model(model_s);
    CertifyOptions co = load_certify_options(root, ctx);
    co.workers = 1;
    trial_fn = [=](Index t) {
      const std::uint64_t seed = mix_seed(ctx.seed, static_cast<std::uint64_t>(t));
      const SparseModel model = model_s == "both" ? (t % 2 ? SparseModel::WeightedCardinality : SparseModel::Cardinality)
                                                  : parse_model(model_s);
      Rng rng(mix_seed(seed, 1));
      const WeightProfile w(random_weights(rng, n, wr[0], wr[1]));
      const SenseMatrix a = gaussian_matrix(m, n, seed);
      Row r{std::to_string(t), std::string(to_string(model)), std::to_string(m), std::to_string(n), csv_num(s)};
      try {
        CertifyOptions c = co;
        c.seed = mix_seed(seed, 2);
        const EquivalenceVerdict v = exact_recovery_equivalence_test(a.values, w, model, s, plants, mix_seed(seed, 3), c);
        r.insert(r.end(), {csv_num(v.nsp.constant), b01(v.nsp.exact), b01(v.nsp_holds), std::to_string(v.supports_tested),
                           std::to_string(v.vectors_tested), std::to_string(v.recovered), csv_num(v.max_relative_error),
                           b01(v.competitor_found), b01(v.consistent), ""});
      } catch (const Error& e) {
        r.insert(r.end(), {"nan", "0", "0", "0", "0", "0", "nan", "0", "0", std::string("error: ") + e.what()});
      }
      for (auto& cell : r)
        for (char& ch : cell)
          if (ch == ',') ch = ';';
      return std::vector<Row>{r};
    };
  } else if (name == "bound_validation") {
    table = bound_table();
    const Index n = root.integer("n", 12);
    std::vector<Index> ms = root.has("m") ? root.ints("m") : std::vector<Index>{n - 1, n - 2, n - 3};
    std::vector<Index> ss = root.has("s") ? root.ints("s") : std::vector<Index>{1, 2};
    const std::vector<double> gws = root.nums("gamma_w", {0.8, 0.9, 1.0});
    const std::vector<double> noises = root.nums("noise_levels", {0.0, 1e-3, 1e-2});
    const double tail = root.num("tail_scale", 1e-3);
    const SolverOptions so = load_solver_options(root);
    CertifyOptions co = load_certify_options(root, ctx);
    co.workers = 1;
    for (Index m : ms)
      if (m < 1 || m > n) schema("'m' entries must lie in [1, n]");
    for (Index s : ss)
      if (s < 1 || 2 * s > n) schema("'s' entries must satisfy 1 <= 2s <= n");
    for (double g : gws)
      if (!(g > 0.0 && g <= 1.0)) schema("'gamma_w' entries must lie in (0, 1]");
    for (double e : noises)
      if (e < 0.0) schema("'noise_levels' must be nonnegative");
    trial_fn = [=](Index t) {
      const std::uint64_t seed = mix_seed(ctx.seed, static_cast<std::uint64_t>(t));
      const std::size_t combo = static_cast<std::size_t>(t);
      const Index m = ms[combo % ms.size()];
      const double gw = gws[(combo / ms.size()) % gws.size()];
      const Index s = ss[(combo / (ms.size() * gws.size())) % ss.size()];
      Rng rng(mix_seed(seed, 1));
      SenseMatrix a = sample_partial_dct(n, m, seed);
      for (Index j = 0; j < n; ++j) a.values.col(j) *= rng.sign();
      const WeightProfile w(random_weights(rng, n, gw, 1.0));
      const double sd = static_cast<double>(s);
      const CertificationReport rip = rip_constant(a.values, w, SparseModel::Cardinality, 2.0 * sd, co);
      const double delta = rip.constant;
      Row head{std::to_string(t), std::to_string(m), std::to_string(n), std::to_string(s), csv_num(gw), csv_num(delta)};
      std::vector<Row> rows;
      if (!(delta < gw / (gw + 2.0))) {
        Row r = head;
        r.insert(r.end(), {"0", "", "", "", "", "", "", "", "", "1", "premise not met"});
        rows.push_back(r);
        return rows;
      }
      const Theorem37Constants c = theorem37_constants(delta, gw);
      const CertificationReport nsp = nsp_constant(a.values, w, SparseModel::Cardinality, sd, co);
      const bool nsp_ok = nsp.constant <= c.nsp_bound + 1e-8;
      const Partition part = build_partition(w, SparseModel::Cardinality, 2.0 * sd, n);
      const double lambda = largest_singular_value(a.values);
      for (std::size_t q = 0; q < noises.size(); ++q) {
        const double eps = noises[q];
        Rng xr(mix_seed(seed, 10 + q));
        CVector x(n);
        for (Index i = 0; i < n; ++i) x(i) = tail * xr.normal();
        std::vector<Index> idx(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
        for (Index i = 0; i < s; ++i) {
          const auto j = static_cast<std::size_t>(i) + xr.below(static_cast<std::uint64_t>(n - i));
          std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
          x(idx[static_cast<std::size_t>(i)]) = xr.sign() * (1.0 + xr.uniform());
        }
        CVector y = a.values * x;
        if (eps > 0.0) {
          CVector e(m);
          for (Index i = 0; i < m; ++i) e(i) = xr.normal();
          y += e * (eps / e.norm());
        }
        const SolverOutcome out = solve_weighted_bpdn(a.values, y, w, eps, so);
        const double err = (out.x - x).norm();
        const double sigma = best_weighted_s_term(x, w, SparseModel::Cardinality, sd).sigma;
        const double bound = c.a2 * sigma / std::sqrt(sd) + c.b2 * eps;
        const ErrorBudget eb = ripnsp_error_budget(sigma, sd, delta, part.count(), lambda, eps, error_constants(c));
        const bool pass = nsp_ok && out.converged && err <= bound + 1e-7 * std::max(1.0, x.norm());
        Row r = head;
        r.insert(r.end(), {"1", csv_num(nsp.constant), csv_num(c.nsp_bound), b01(nsp_ok), csv_num(eps), csv_num(sigma),
                           csv_num(err), csv_num(bound), eb.l2_bound ? csv_num(*eb.l2_bound) : "",
                           b01(pass), out.converged ? "" : "solver not converged"});
        rows.push_back(r);
      }
      return rows;
    };
  } else if (name == "scaling") {
    table = scaling_table();
    const Index n = root.integer("n", 10);
    const Index m = root.integer("m", 6);
    const double s = root.num("s", 2.0);
    const SparseModel model = parse_model(root.str("model", "weighted_cardinality"));
    const std::vector<double> wr = root.nums("weight_range", {1.0, 1.0});
    const std::vector<double> scales = root.nums("scales", {0.5, 2.0});
    const double rho_d = root.num("rho", 0.5);
    const double gamma_d = root.num("gamma", 2.0);
    if (wr.size() != 2 || !(wr[0] > 0.0) || wr[1] < wr[0]) schema("'weight_range' must be [low, high]");
    for (double c : scales)
      if (!(c > 0.0)) schema("'scales' must be positive");
    CertifyOptions co = load_certify_options(root, ctx);
    co.workers = 1;
    trial_fn = [=](Index t) {
      const std::uint64_t seed = mix_seed(ctx.seed, static_cast<std::uint64_t>(t));
      Rng rng(mix_seed(seed, 1));
      const WeightProfile w(random_weights(rng, n, wr[0], wr[1]));
      const SenseMatrix a = gaussian_matrix(m, n, seed);
      const double delta = rip_constant(a.values, w, model, s, co).constant;
      const double nsp = nsp_constant(a.values, w, model, s, co).constant;
      std::vector<Row> rows;
      std::vector<double> cs = scales;
      if (delta < 1.0) cs.push_back(0.5 * std::sqrt((1.0 - delta) / (1.0 + delta)));
      for (double c : cs) {
        const CMatrix ca = c * a.values;
        const double dsc = rip_constant(ca, w, model, s, co).constant;
        const double nsc = nsp_constant(ca, w, model, s, co).constant;
        const bool predicted = c * c < (1.0 - delta) / (1.0 + delta);
        const bool broken = dsc > delta;
        const double diff = std::isfinite(nsp) && std::isfinite(nsc) ? std::abs(nsp - nsc) : (nsp == nsc ? 0.0 : INFINITY);
        const bool pass = diff <= 1e-10 && (!predicted || broken);
        rows.push_back({std::to_string(t), "scale", csv_num(c), csv_num(delta), csv_num(dsc), b01(predicted),
                        b01(broken), csv_num(nsp), csv_num(nsc), csv_num(diff), "", b01(pass), ""});
      }
      if (model == SparseModel::WeightedCardinality) {
        double rho = rho_d, gamma = gamma_d;
        std::string note = "configured rho/gamma";
        const double d3 = rip_constant(a.values, w, model, 3.0 * s, co).constant;
        if (d3 < 1.0 / 3.0) {
          const Case1Constants cc = case1_constants(d3);
          rho = cc.rho;
          gamma = cc.gamma;
          note = "rho/gamma from delta_3s";
        }
        CVector x = CVector::Zero(n);
        x(0) = 1.0;
        try {
          const ShrinkResult r = shrink_to_break_robust_nsp(a.values, w, s, rho, gamma, x);
          rows.push_back({std::to_string(t), "shrink", csv_num(r.c), "", "", "", "", "", "", "", b01(r.replay_violates),
                          b01(r.replay_violates), note});
        } catch (const Error& e) {
          std::string what = e.what();
          for (char& ch : what)
            if (ch == ',') ch = ';';
          rows.push_back({std::to_string(t), "shrink", "", "", "", "", "", "", "", "", "0", "0", "error: " + what});
        }
      }
      return rows;
    };
  } else {
    schema("unknown experiment '" + name + "' (equivalence, bound_validation, scaling)");
  }
  root.done();

  json canon = config;
  canon.erase("time_budget_s");
  canon.erase("resume_token");
  const std::string hash = fnv_hex(canon.dump() + "|" + std::to_string(ctx.seed));
  Index start = 0;
  if (!token.empty()) {
    const auto p1 = token.find(':');
    const auto p2 = token.rfind(':');
    bool ok = p1 != std::string::npos && p2 != p1 && token.substr(0, p1) == name && token.substr(p2 + 1) == hash;
    if (ok) {
      try {
        start = static_cast<Index>(std::stoll(token.substr(p1 + 1, p2 - p1 - 1)));
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok || start < 0 || start > trials) schema("resume_token does not match this experiment config and seed");
  }

  const fs::path out_dir = ctx.out_dir.value_or(fs::path("."));
  ensure_dir(out_dir);
  const std::string csv_name = name + ".csv";
  const fs::path csv_path = out_dir / csv_name;
  const std::string header_line = join_csv(table.header);
  if (start > 0) {
    std::ifstream is(csv_path);
    std::string first;
    if (!is || !std::getline(is, first) || first != header_line)
      fail(ErrorCode::Io, "cannot resume: '" + csv_path.string() + "' is missing or has a different header");
  }

  const auto t0 = std::chrono::steady_clock::now();
  const SweepResult sr = run_sweep(start, trials, ctx.workers, budget, trial_fn);
  {
    std::ofstream os(csv_path, start > 0 ? std::ios::app | std::ios::binary : std::ios::trunc | std::ios::binary);
    if (!os) fail(ErrorCode::Io, "cannot open '" + csv_path.string() + "' for writing");
    if (start == 0) os << header_line << '\n';
    for (const auto& trial_rows : sr.rows)
      for (const Row& r : trial_rows) os << join_csv(r) << '\n';
    if (!os) fail(ErrorCode::Io, "write to '" + csv_path.string() + "' failed");
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  // summary over the whole file, so resumed runs report every trial
  std::size_t rows = 0, passed = 0, premise_rows = 0;
  std::optional<std::size_t> premise_col;
  for (std::size_t c = 0; c < table.header.size(); ++c)
    if (table.header[c] == "premise") premise_col = c;
  {
    std::ifstream is(csv_path);
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      std::vector<std::string> cells;
      std::string cell;
      std::istringstream ls(line);
      while (std::getline(ls, cell, ',')) cells.push_back(cell);
      if (line.back() == ',') cells.emplace_back();
      ++rows;
      if (cells.size() > table.pass_col && cells[table.pass_col] == "1") ++passed;
      if (premise_col && cells.size() > *premise_col && cells[*premise_col] == "1") ++premise_rows;
    }
  }

  const Index done_through = start + sr.completed;
  json j;
  j["experiment"] = name;
  j["seed"] = ctx.seed;
  j["trials"] = trials;
  j["start"] = start;
  j["completed_through"] = done_through;
  j["complete"] = sr.complete;
  j["rows"] = rows;
  j["passed"] = passed;
  j["failed"] = rows - passed;
  if (premise_col) j["premise_rows"] = premise_rows;
  j["csv"] = csv_name;
  j["columns"] = table.header;
  j["resume_token"] = sr.complete ? json(nullptr) : json(name + ":" + std::to_string(done_through) + ":" + hash);
  write_json(out_dir / (name + "_summary.json"), j);

  telemetry["sweep_seconds"] = elapsed;
  if (!sr.complete) {
    exit_code = 1;
    message = "time budget exhausted after " + std::to_string(done_through) + " of " + std::to_string(trials) +
              " trials; rerun with \"resume_token\": \"" + j["resume_token"].get<std::string>() + "\"";
  } else {
    exit_code = rows == passed ? 0 : 2;
  }
  return j;
}

}  // namespace

CommandResult run_command(std::string_view command, const std::string& config_text, const CommandOptions& opts) {
  json config;
  try {
    config = json::parse(config_text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Parse, std::string("config is not valid JSON: ") + e.what());
  }
  Cfg root(config, "");
  if (root.has("schema_version") && root.integer("schema_version") != 1) schema("unsupported schema_version");

  Ctx ctx;
  ctx.command = std::string(command);
  ctx.base_dir = opts.base_dir;
  ctx.out_dir = opts.out_dir;
  const std::uint64_t cfg_seed = root.u64("seed", 1);
  ctx.seed = opts.seed.value_or(cfg_seed);
  const unsigned hw = std::thread::hardware_concurrency();
  ctx.workers = opts.workers.value_or(hw == 0 ? 1 : static_cast<Index>(hw));
  require(ctx.workers >= 1, ErrorCode::InvalidArgument, "worker count must be positive");

  const auto t0 = std::chrono::steady_clock::now();
  CommandResult res;
  json telemetry;
  json result;
  if (command == "certify") {
    result = cmd_certify(root, ctx, res.exit_code);
  } else if (command == "recover") {
    result = cmd_recover(root, ctx, res.exit_code);
  } else if (command == "construct") {
    result = cmd_construct(root, ctx, res.exit_code);
  } else if (command == "experiment") {
    result = cmd_experiment(root, config, ctx, res.exit_code, res.message, telemetry);
  } else {
    fail(ErrorCode::InvalidArgument, "unknown command '" + std::string(command) + "' (certify, recover, construct, experiment)");
  }
  if (command != "experiment") root.done();
  telemetry["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  telemetry["workers"] = ctx.workers;

  json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["command"] = std::string(command);
  doc["exit_code"] = res.exit_code;
  doc["result"] = result;
  doc["telemetry"] = telemetry;
  res.json = doc.dump(2);
  return res;
}

CommandResult run_command_file(std::string_view command, const std::filesystem::path& config, CommandOptions opts) {
  std::ifstream is(config, std::ios::binary);
  if (!is) fail(ErrorCode::Io, "cannot open config '" + config.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  if (opts.base_dir == ".") opts.base_dir = config.has_parent_path() ? config.parent_path() : fs::path(".");
  return run_command(command, ss.str(), opts);
}

}  // namespace wcs
