#pragma once

// Convex relaxations of the sparse selection problems and ridge refitting.
//
//   lasso:                  Err(c, b) + lambda ||c||_1
//   solve_all_single_task:  sum_l (1/N_l) Err(c_l, b_l) + lambda sum_l ||c_l||_1
//   group_solver:           sum_l (1/N_l) Err(c_l, b_l) + lambda ||C||_{1,q},  q in {2, inf}
//
// Biases are never penalized; every solver works on centered data.

#include <vector>

#include "ssa/model.hpp"

namespace ssa {

enum class StepRule { Lipschitz, Backtracking };
enum class RowNorm { L2, LInf };

struct ConvexConfig {
  double lambda = 1.0;
  Index max_iters = 20000;
  double rel_tol = 1e-12;
  StepRule step_rule = StepRule::Backtracking;
  RowNorm q = RowNorm::LInf;

  void validate() const;
};

struct ConvexFit {
  CoefficientMatrix coefficients;
  std::vector<double> objective_trace;  // one entry per iteration, starting at the initial point
  bool converged = false;
  Index iterations_used = 0;
};

ConvexFit lasso(const DataMatrix& x, const Eigen::Ref<const Vector>& y, const ConvexConfig& cfg);

/// lasso with the loss scaled by loss_weight: loss_weight * Err(c, b) + lambda ||c||_1.
ConvexFit weighted_lasso(const DataMatrix& x, const Eigen::Ref<const Vector>& y, double loss_weight,
                         const ConvexConfig& cfg);

ConvexFit solve_all_single_task(const DataMatrix& x, const IndicatorResponse& y, const ConvexConfig& cfg);

ConvexFit group_solver(const DataMatrix& x, const IndicatorResponse& y, const ConvexConfig& cfg);
/// Same program for arbitrary responses and positive task weights.
ConvexFit group_solver(const DataMatrix& x, const Eigen::Ref<const Matrix>& y, const Vector& task_weights,
                       const ConvexConfig& cfg);

/// Smallest lambda for which c = 0 solves the (unweighted) lasso.
double lasso_lambda_max(const DataMatrix& x, const Eigen::Ref<const Vector>& y);
/// Smallest lambda for which C = 0 solves the group program: max_i of the
/// dual row norm of the loss gradient at zero.
double group_lambda_max(const DataMatrix& x, const IndicatorResponse& y, RowNorm q);

/// Objective of the group program at the given coefficients.
double group_objective(const DataMatrix& x, const Eigen::Ref<const Matrix>& y, const Vector& task_weights,
                       const CoefficientMatrix& c, double lambda, RowNorm q);

// Proximal and projection operators.

/// Euclidean projection onto { u : ||u||_1 <= radius }.
Vector project_l1_ball(const Eigen::Ref<const Vector>& v, double radius);
/// argmin_u 0.5 ||u - v||^2 + t ||u||_inf, via v - project_l1_ball(v, t).
Vector prox_row_linf(const Eigen::Ref<const Vector>& v, double t);
/// argmin_u 0.5 ||u - v||^2 + t ||u||_2 (group soft-thresholding).
Vector prox_row_l2(const Eigen::Ref<const Vector>& v, double t);

/// Ridge regression of every task on the shared support:
/// (X_S^T X_S + alpha I) c_l = X_S^T y_l on centered data. Off-support rows are zero.
CoefficientMatrix ridge_refit(const DataMatrix& x, const IndicatorResponse& y, const SupportSet& support,
                              double alpha);
CoefficientMatrix ridge_refit(const DataMatrix& x, const Eigen::Ref<const Matrix>& y, const SupportSet& support,
                              double alpha);

/// Rows surviving row_l0_eps with eps = 1e-6 * (largest row norm), trimmed to
/// the `budget` largest row l_q norms. Returned in descending norm order.
SupportSet extract_support(const Eigen::Ref<const Matrix>& weights, Index budget, RowNorm q);

}  // namespace ssa
