#ifndef WCS_CORE_HPP
#define WCS_CORE_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace wcs {

using Index = Eigen::Index;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

/// Strictly positive, finite per-index weights with cached extremes.
class WeightProfile {
public:
  explicit WeightProfile(std::vector<double> w);

  static WeightProfile uniform(Index n, double value = 1.0);

  Index size() const { return static_cast<Index>(w_.size()); }
  double operator[](Index i) const { return w_[static_cast<std::size_t>(i)]; }
  double max() const { return max_; }
  double min() const { return min_; }
  const std::vector<double>& values() const { return w_; }

  /// Weights of indices [from, size()).
  WeightProfile tail(Index from) const;

private:
  std::vector<double> w_;
  double max_ = 0.0;
  double min_ = 0.0;
};

/// Which set function measures the size of a support.
///   Cardinality:          nu(S) = |S|
///   WeightedCardinality:  nu(S) = sum_{i in S} w_i^2
enum class SparseModel { Cardinality, WeightedCardinality };

std::string_view to_string(SparseModel model);
SparseModel parse_model(std::string_view text);

/// Sorted, duplicate-free index set inside [0, dim).
class Support {
public:
  Support() = default;
  Support(std::vector<Index> indices, Index dim);

  Index dim() const { return dim_; }
  Index size() const { return static_cast<Index>(idx_.size()); }
  bool empty() const { return idx_.empty(); }
  bool contains(Index i) const;
  const std::vector<Index>& indices() const { return idx_; }
  auto begin() const { return idx_.begin(); }
  auto end() const { return idx_.end(); }

  Support complement() const;
  /// Boolean membership mask of length dim().
  std::vector<char> mask() const;

  friend bool operator==(const Support&, const Support&) = default;
  friend bool operator<(const Support& a, const Support& b) { return a.idx_ < b.idx_; }

private:
  std::vector<Index> idx_;
  Index dim_ = 0;
};

std::string to_string(const Support& s);

/// Budget comparison used by every admissibility test. The slack absorbs the
/// rounding of sums of squared weights.
bool fits_budget(double measure, double budget);

/// Throws unless s is positive and finite (and integral for Cardinality).
void validate_budget(double s, SparseModel model);

double element_measure(Index i, const WeightProfile& w, SparseModel model);
double sparse_measure(const Support& S, const WeightProfile& w, SparseModel model);

/// Default 24, overridden by the WCS_ENUM_CAP environment variable.
Index enumeration_cap();

struct EnumerationOptions {
  Index cap = -1;              ///< <0 means enumeration_cap()
  bool maximal_only = false;   ///< only supports no further index fits into
};

/// Visits every nonempty S with nu(S) <= s once, in lexicographic order
/// ({0}, {0,1}, {0,1,2}, ..., {1}, ...). Returning false from the visitor
/// stops the walk.
void enumerate_admissible_supports(Index dim, const WeightProfile& w, SparseModel model,
                                   double s,
                                   const std::function<bool(const Support&)>& visit,
                                   EnumerationOptions opts = {});

std::vector<Support> admissible_supports(Index dim, const WeightProfile& w, SparseModel model,
                                         double s, EnumerationOptions opts = {});

double weighted_l1_norm(const CVector& x, const WeightProfile& w);
double weighted_l1_norm(const CVector& x, const WeightProfile& w, const Support& S);

struct BestTerm {
  Support support;
  double kept = 0.0;   ///< ||x_S||_{w,1}
  double sigma = 0.0;  ///< ||x_{S^c}||_{w,1}
  bool approximate = false;
};

struct BestTermOptions {
  Index cap = -1;                     ///< exact-mode limit for WeightedCardinality
  bool allow_greedy_fallback = false;
};

/// Best weighted s-term approximation. Cardinality keeps the s largest
/// w_i|x_i| (lower index wins ties); WeightedCardinality solves the 0/1
/// knapsack max sum w_i|x_i| s.t. sum w_i^2 <= s by branch and bound.
BestTerm best_weighted_s_term(const CVector& x, const WeightProfile& w, SparseModel model,
                              double s, BestTermOptions opts = {});

/// Same problem on precomputed item values v_i = w_i |x_i| >= 0.
BestTerm best_term_from_values(std::span<const double> values, const WeightProfile& w,
                               SparseModel model, double s, BestTermOptions opts = {});

struct Partition {
  std::vector<std::vector<Index>> blocks;
  Index count() const { return static_cast<Index>(blocks.size()); }
  /// N*||w||_inf^2/s + 1, WeightedCardinality only.
  std::optional<double> estimate;
  bool estimate_holds = true;
  /// sum w^2 / (s - ||w||_inf^2) + 1, a bound greedy packing always obeys
  /// for WeightedCardinality when s > ||w||_inf^2.
  std::optional<double> packing_bound;
};

/// Greedy left-to-right packing of [0, dim) into contiguous blocks of
/// measure at most s.
Partition build_partition(const WeightProfile& w, SparseModel model, double s, Index dim);

}  // namespace wcs

#endif  // WCS_CORE_HPP
