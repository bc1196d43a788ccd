#ifndef WCS_SOLVER_HPP
#define WCS_SOLVER_HPP

#include <vector>

#include "wcs/core.hpp"

namespace wcs {

struct SolverOptions {
  double feasibility_tol = 1e-9;  ///< relative to max(1, ||y||_2)
  double objective_tol = 1e-8;    ///< duality gap relative to max(1, objective)
  Index max_iterations = 100000;
  Index check_every = 10;         ///< iterations between gap evaluations
  bool polish = true;             ///< least-squares refit on the detected support (eps = 0)
  bool record_trace = false;
};

struct SolverOutcome {
  CVector x;
  double objective = 0.0;   ///< ||x||_{w,1}
  double residual = 0.0;    ///< ||Ax - y||_2
  double epsilon = 0.0;
  double dual_bound = 0.0;  ///< certified lower bound on the optimal objective
  double gap = 0.0;         ///< objective - dual_bound
  double penalty = 0.0;     ///< final ADMM penalty
  Index iterations = 0;
  bool converged = false;
  bool zero_solution = false;  ///< eps >= ||y||_2, origin optimal
  bool polished = false;
  /// Best feasible objective at each check (nonincreasing); filled when
  /// record_trace is set.
  std::vector<double> objective_trace;
};

/// Proximal map of the weighted l1 norm: (1 - tau_i/|z_i|)_+ z_i.
CVector complex_soft_threshold(const CVector& z, const RVector& tau);

/// min ||z||_{w,1} s.t. Az = y. Throws Infeasible when y is not in range(A).
SolverOutcome solve_weighted_bp(const CMatrix& a, const CVector& y, const WeightProfile& w,
                                const SolverOptions& opts = {});

/// min ||z||_{w,1} s.t. ||Az - y||_2 <= eps, by ADMM with an exact
/// projection onto the constraint set. eps = 0 is the equality program.
SolverOutcome solve_weighted_bpdn(const CMatrix& a, const CVector& y, const WeightProfile& w,
                                  double epsilon, const SolverOptions& opts = {});

}  // namespace wcs

#endif  // WCS_SOLVER_HPP
