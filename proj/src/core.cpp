#include "wcs/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <sstream>

#include "wcs/error.hpp"

namespace wcs {

WeightProfile::WeightProfile(std::vector<double> w) : w_(std::move(w)) {
  require(!w_.empty(), ErrorCode::InvalidArgument, "weight profile is empty");
  max_ = w_.front();
  min_ = w_.front();
  for (std::size_t i = 0; i < w_.size(); ++i) {
    const double v = w_[i];
    if (!std::isfinite(v) || v <= 0.0) {
      std::ostringstream os;
      os << "weight " << i << " must be positive and finite, got " << v;
      fail(ErrorCode::InvalidArgument, os.str());
    }
    max_ = std::max(max_, v);
    min_ = std::min(min_, v);
  }
}

WeightProfile WeightProfile::uniform(Index n, double value) {
  require(n > 0, ErrorCode::InvalidArgument, "uniform weights need n > 0");
  return WeightProfile(std::vector<double>(static_cast<std::size_t>(n), value));
}

WeightProfile WeightProfile::tail(Index from) const {
  require(from >= 0 && from < size(), ErrorCode::InvalidArgument, "weight tail out of range");
  return WeightProfile(std::vector<double>(w_.begin() + from, w_.end()));
}

std::string_view to_string(SparseModel model) {
  switch (model) {
    case SparseModel::Cardinality: return "cardinality";
    case SparseModel::WeightedCardinality: return "weighted_cardinality";
  }
  return "?";
}

SparseModel parse_model(std::string_view text) {
  if (text == "cardinality") return SparseModel::Cardinality;
  if (text == "weighted_cardinality") return SparseModel::WeightedCardinality;
  fail(ErrorCode::InvalidArgument,
       "unknown sparse model '" + std::string(text) +
           "' (expected cardinality or weighted_cardinality)");
}

Support::Support(std::vector<Index> indices, Index dim) : idx_(std::move(indices)), dim_(dim) {
  require(dim >= 0, ErrorCode::InvalidArgument, "support dimension must be nonnegative");
  std::sort(idx_.begin(), idx_.end());
  for (std::size_t k = 0; k < idx_.size(); ++k) {
    if (idx_[k] < 0 || idx_[k] >= dim) {
      fail(ErrorCode::InvalidArgument,
           "support index " + std::to_string(idx_[k]) + " outside [0," + std::to_string(dim) + ")");
    }
    if (k > 0 && idx_[k] == idx_[k - 1]) {
      fail(ErrorCode::InvalidArgument, "duplicate support index " + std::to_string(idx_[k]));
    }
  }
}

bool Support::contains(Index i) const { return std::binary_search(idx_.begin(), idx_.end(), i); }

Support Support::complement() const {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(dim_ - size()));
  auto it = idx_.begin();
  for (Index i = 0; i < dim_; ++i) {
    if (it != idx_.end() && *it == i) {
      ++it;
    } else {
      out.push_back(i);
    }
  }
  return Support(std::move(out), dim_);
}

std::vector<char> Support::mask() const {
  std::vector<char> m(static_cast<std::size_t>(dim_), 0);
  for (Index i : idx_) m[static_cast<std::size_t>(i)] = 1;
  return m;
}

std::string to_string(const Support& s) {
  std::ostringstream os;
  os << '{';
  for (std::size_t k = 0; k < s.indices().size(); ++k) {
    if (k) os << ',';
    os << s.indices()[k];
  }
  os << '}';
  return os.str();
}

bool fits_budget(double measure, double budget) {
  return measure <= budget + 1e-12 * std::max(1.0, std::abs(budget));
}

void validate_budget(double s, SparseModel model) {
  require(std::isfinite(s) && s > 0.0, ErrorCode::InvalidArgument,
          "sparsity budget must be positive and finite");
  if (model == SparseModel::Cardinality) {
    require(std::floor(s) == s, ErrorCode::InvalidArgument,
            "cardinality budget must be an integer");
  }
}

double element_measure(Index i, const WeightProfile& w, SparseModel model) {
  if (model == SparseModel::Cardinality) return 1.0;
  return w[i] * w[i];
}

double sparse_measure(const Support& S, const WeightProfile& w, SparseModel model) {
  require(S.dim() == w.size(), ErrorCode::DimensionMismatch, "support and weights differ in length");
  if (model == SparseModel::Cardinality) return static_cast<double>(S.size());
  double total = 0.0;
  for (Index i : S) total += w[i] * w[i];
  return total;
}

Index enumeration_cap() {
  if (const char* env = std::getenv("WCS_ENUM_CAP")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 62) return static_cast<Index>(v);
  }
  return 24;
}

namespace {

Index resolve_cap(Index cap) { return cap < 0 ? enumeration_cap() : cap; }

void check_cap(Index dim, Index cap) {
  if (dim > cap) {
    fail(ErrorCode::CapExceeded,
         "dimension " + std::to_string(dim) + " exceeds the enumeration cap " + std::to_string(cap) +
             " (raise WCS_ENUM_CAP to override)");
  }
}

}  // namespace

void enumerate_admissible_supports(Index dim, const WeightProfile& w, SparseModel model, double s,
                                   const std::function<bool(const Support&)>& visit,
                                   EnumerationOptions opts) {
  require(dim == w.size(), ErrorCode::DimensionMismatch, "dimension and weights differ in length");
  validate_budget(s, model);
  check_cap(dim, resolve_cap(opts.cap));

  std::vector<double> cost(static_cast<std::size_t>(dim));
  for (Index i = 0; i < dim; ++i) cost[static_cast<std::size_t>(i)] = element_measure(i, w, model);

  std::vector<Index> current;
  std::vector<char> in(static_cast<std::size_t>(dim), 0);
  bool stop = false;

  auto is_maximal = [&](double used) {
    for (Index j = 0; j < dim; ++j) {
      if (!in[static_cast<std::size_t>(j)] && fits_budget(used + cost[static_cast<std::size_t>(j)], s))
        return false;
    }
    return true;
  };

  // Depth-first in lexicographic order; a prefix that overflows is never
  // extended, which prunes the WeightedCardinality tree.
  std::function<void(Index, double)> walk = [&](Index start, double used) {
    for (Index i = start; i < dim && !stop; ++i) {
      const double next = used + cost[static_cast<std::size_t>(i)];
      if (!fits_budget(next, s)) continue;
      current.push_back(i);
      in[static_cast<std::size_t>(i)] = 1;
      if (!opts.maximal_only || is_maximal(next)) {
        if (!visit(Support(current, dim))) stop = true;
      }
      if (!stop) walk(i + 1, next);
      in[static_cast<std::size_t>(i)] = 0;
      current.pop_back();
    }
  };
  walk(0, 0.0);
}

std::vector<Support> admissible_supports(Index dim, const WeightProfile& w, SparseModel model,
                                         double s, EnumerationOptions opts) {
  std::vector<Support> out;
  enumerate_admissible_supports(
      dim, w, model, s,
      [&](const Support& S) {
        out.push_back(S);
        return true;
      },
      opts);
  return out;
}

double weighted_l1_norm(const CVector& x, const WeightProfile& w) {
  if (x.size() != w.size()) {
    fail(ErrorCode::DimensionMismatch, "vector length " + std::to_string(x.size()) +
                                           " differs from weight length " + std::to_string(w.size()));
  }
  double total = 0.0;
  for (Index j = 0; j < x.size(); ++j) total += w[j] * std::abs(x[j]);
  return total;
}

double weighted_l1_norm(const CVector& x, const WeightProfile& w, const Support& S) {
  require(x.size() == w.size() && S.dim() == x.size(), ErrorCode::DimensionMismatch,
          "vector, weights and support differ in length");
  double total = 0.0;
  for (Index j : S) total += w[j] * std::abs(x[j]);
  return total;
}

namespace {

struct Knapsack {
  std::vector<Index> order;  // items sorted by value density, descending
  std::vector<double> value;
  std::vector<double> cost;
  double capacity = 0.0;

  double best_value = -1.0;
  std::vector<Index> best_set;
  std::vector<Index> current;

  static bool lex_less(std::vector<Index> a, std::vector<Index> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a < b;
  }

  double tie_tol() const { return 1e-12 * std::max(1.0, best_value); }

  // Fractional relaxation over order[pos..].
  double bound(std::size_t pos, double used, double val) const {
    double room = capacity - used;
    for (std::size_t k = pos; k < order.size(); ++k) {
      const auto i = static_cast<std::size_t>(order[k]);
      if (cost[i] <= room) {
        room -= cost[i];
        val += value[i];
      } else {
        return val + value[i] * (room / cost[i]);
      }
    }
    return val;
  }

  void offer(double val) {
    if (val > best_value + tie_tol() ||
        (val >= best_value - tie_tol() && lex_less(current, best_set))) {
      best_value = std::max(val, best_value);
      best_set = current;
    }
  }

  void search(std::size_t pos, double used, double val) {
    if (pos == order.size()) {
      offer(val);
      return;
    }
    if (bound(pos, used, val) < best_value - tie_tol()) return;
    const auto i = static_cast<std::size_t>(order[pos]);
    if (fits_budget(used + cost[i], capacity)) {
      current.push_back(order[pos]);
      search(pos + 1, used + cost[i], val + value[i]);
      current.pop_back();
    }
    search(pos + 1, used, val);
  }
};

}  // namespace

BestTerm best_term_from_values(std::span<const double> values, const WeightProfile& w,
                               SparseModel model, double s, BestTermOptions opts) {
  const auto n = static_cast<Index>(values.size());
  require(n == w.size(), ErrorCode::DimensionMismatch, "values and weights differ in length");
  validate_budget(s, model);
  const double total = std::accumulate(values.begin(), values.end(), 0.0);

  BestTerm out;
  std::vector<Index> chosen;

  if (model == SparseModel::Cardinality) {
    std::vector<Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Index{0});
    std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
      return values[static_cast<std::size_t>(a)] > values[static_cast<std::size_t>(b)];
    });
    const auto keep = static_cast<std::size_t>(std::min<double>(s, static_cast<double>(n)));
    chosen.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep));
  } else {
    const Index cap = resolve_cap(opts.cap);
    std::vector<Index> items;
    for (Index i = 0; i < n; ++i) {
      if (values[static_cast<std::size_t>(i)] > 0.0 && fits_budget(w[i] * w[i], s)) items.push_back(i);
    }
    auto by_density = [&](Index a, Index b) {
      const double da = values[static_cast<std::size_t>(a)] / (w[a] * w[a]);
      const double db = values[static_cast<std::size_t>(b)] / (w[b] * w[b]);
      return da > db;
    };
    std::stable_sort(items.begin(), items.end(), by_density);

    if (n > cap) {
      if (!opts.allow_greedy_fallback) check_cap(n, cap);
      // Greedy by value density; the result is tagged approximate.
      double used = 0.0;
      for (Index i : items) {
        if (fits_budget(used + w[i] * w[i], s)) {
          used += w[i] * w[i];
          chosen.push_back(i);
        }
      }
      out.approximate = true;
    } else {
      Knapsack ks;
      ks.order = items;
      ks.value.assign(values.begin(), values.end());
      ks.cost.resize(static_cast<std::size_t>(n));
      for (Index i = 0; i < n; ++i) ks.cost[static_cast<std::size_t>(i)] = w[i] * w[i];
      ks.capacity = s;
      ks.search(0, 0.0, 0.0);
      chosen = ks.best_set;
    }
  }

  out.support = Support(chosen, n);
  double kept = 0.0;
  for (Index i : out.support) kept += values[static_cast<std::size_t>(i)];
  out.kept = kept;
  out.sigma = std::max(0.0, total - kept);
  return out;
}

BestTerm best_weighted_s_term(const CVector& x, const WeightProfile& w, SparseModel model, double s,
                              BestTermOptions opts) {
  require(x.size() == w.size(), ErrorCode::DimensionMismatch, "vector and weights differ in length");
  std::vector<double> values(static_cast<std::size_t>(x.size()));
  for (Index i = 0; i < x.size(); ++i) values[static_cast<std::size_t>(i)] = w[i] * std::abs(x[i]);
  BestTerm out = best_term_from_values(values, w, model, s, opts);
  // Recompute sigma from the complement directly; the subtraction above can
  // lose digits when x is nearly sparse.
  out.sigma = weighted_l1_norm(x, w, out.support.complement());
  return out;
}

Partition build_partition(const WeightProfile& w, SparseModel model, double s, Index dim) {
  require(dim == w.size(), ErrorCode::DimensionMismatch, "dimension and weights differ in length");
  validate_budget(s, model);
  Partition p;
  std::vector<Index> block;
  double used = 0.0;
  for (Index i = 0; i < dim; ++i) {
    const double c = element_measure(i, w, model);
    if (!fits_budget(c, s)) {
      fail(ErrorCode::Precondition, "index " + std::to_string(i) + " alone has measure " +
                                        std::to_string(c) + " > budget " + std::to_string(s));
    }
    if (!fits_budget(used + c, s)) {
      p.blocks.push_back(std::move(block));
      block.clear();
      used = 0.0;
    }
    block.push_back(i);
    used += c;
  }
  if (!block.empty()) p.blocks.push_back(std::move(block));

  if (model == SparseModel::WeightedCardinality) {
    const double wmax2 = w.max() * w.max();
    p.estimate = static_cast<double>(dim) * wmax2 / s + 1.0;
    p.estimate_holds = static_cast<double>(p.count()) <= *p.estimate + 1e-12;
    if (s > wmax2) {
      double total = 0.0;
      for (double v : w.values()) total += v * v;
      p.packing_bound = total / (s - wmax2) + 1.0;
    }
  }
  return p;
}

}  // namespace wcs
