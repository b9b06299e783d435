#include "ssa/convex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ssa/centering.hpp"
#include "ssa/errors.hpp"

namespace ssa {

namespace {

constexpr double kTiny = 1e-300;

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

bool relative_change_below(double previous, double current, double tol) {
  return std::abs(previous - current) <= tol * std::max(std::abs(current), kTiny);
}

struct LassoPath {
  Vector coefficients;
  std::vector<double> trace;
  bool converged = false;
  Index iterations = 0;
};

// Cyclic coordinate descent for  weight * ||yc - Xc c||^2 + lambda ||c||_1
// on centered data. Convergence needs a small relative objective change and a
// stationarity check well inside the public certificate; a run whose objective
// stops moving entirely is also treated as converged.
LassoPath coordinate_descent(const Matrix& xc, const Vector& col_sq, const Eigen::Ref<const Vector>& yc,
                             double weight, const ConvexConfig& cfg) {
  const Index d = xc.cols();
  const double mu = cfg.lambda / weight;  // penalty on the unweighted loss
  LassoPath out;
  out.coefficients = Vector::Zero(d);
  Vector residual = yc;

  auto objective = [&](const Vector& r, const Vector& c) {
    return weight * r.squaredNorm() + cfg.lambda * c.cwiseAbs().sum();
  };
  auto kkt_violation = [&](const Vector& r, const Vector& c) {
    const Vector g = 2.0 * (xc.transpose() * r);
    double worst = 0.0;
    for (Index j = 0; j < d; ++j) {
      if (col_sq(j) == 0.0) continue;
      const double v = (c(j) != 0.0) ? std::abs(g(j) - mu * (c(j) > 0 ? 1.0 : -1.0))
                                     : std::max(0.0, std::abs(g(j)) - mu);
      worst = std::max(worst, v);
    }
    return worst;
  };

  double current = objective(residual, out.coefficients);
  out.trace.push_back(current);
  int stalled = 0;
  for (Index sweep = 1; sweep <= cfg.max_iters; ++sweep) {
    for (Index j = 0; j < d; ++j) {
      if (col_sq(j) == 0.0) continue;
      const double old = out.coefficients(j);
      const double z = xc.col(j).dot(residual) + col_sq(j) * old;
      const double updated = soft_threshold(z, 0.5 * mu) / col_sq(j);
      if (updated != old) {
        residual.noalias() -= (updated - old) * xc.col(j);
        out.coefficients(j) = updated;
      }
    }
    residual = yc - xc * out.coefficients;
    const double next = objective(residual, out.coefficients);
    out.trace.push_back(next);
    out.iterations = sweep;

    stalled = (next == current) ? stalled + 1 : 0;
    const bool small_change = relative_change_below(current, next, cfg.rel_tol);
    current = next;
    if (small_change && (stalled >= 3 || kkt_violation(residual, out.coefficients) <= 1e-9 * mu)) {
      out.converged = true;
      break;
    }
  }
  return out;
}

struct Problem {
  CenteredData data;
  Vector col_sq;
};

Problem prepare(const DataMatrix& x, const Eigen::Ref<const Matrix>& y) {
  Problem p{center(x, y), {}};
  p.col_sq = p.data.x.colwise().squaredNorm().transpose();
  return p;
}

Matrix group_gradient(const Matrix& xc, const Matrix& residual, const Vector& weights) {
  return -2.0 * (xc.transpose() * residual) * weights.asDiagonal();
}

double weighted_loss(const Matrix& residual, const Vector& weights) {
  double total = 0.0;
  for (Index l = 0; l < residual.cols(); ++l) total += weights(l) * residual.col(l).squaredNorm();
  return total;
}

double row_penalty(const Matrix& c, RowNorm q) {
  double total = 0.0;
  for (Index i = 0; i < c.rows(); ++i) {
    total += (q == RowNorm::LInf) ? c.row(i).cwiseAbs().maxCoeff() : c.row(i).norm();
  }
  return total;
}

Matrix row_prox(const Matrix& v, double t, RowNorm q) {
  Matrix out(v.rows(), v.cols());
  for (Index i = 0; i < v.rows(); ++i) {
    const Vector row = v.row(i).transpose();
    out.row(i) = ((q == RowNorm::LInf) ? prox_row_linf(row, t) : prox_row_l2(row, t)).transpose();
  }
  return out;
}

// Largest eigenvalue of Xc^T Xc by 50 power iterations from a fixed start.
double spectral_norm_sq(const Matrix& xc) {
  Vector v = Vector::Ones(xc.cols()).normalized();
  double estimate = 0.0;
  for (int it = 0; it < 50; ++it) {
    Vector w = xc.transpose() * (xc * v);
    estimate = w.norm();
    if (estimate == 0.0) return 0.0;
    v = w / estimate;
  }
  return estimate;
}

}  // namespace

void ConvexConfig::validate() const {
  detail::require(std::isfinite(lambda) && lambda > 0.0, "lambda must be finite and > 0");
  detail::require(max_iters >= 1, "max_iters must be >= 1");
  detail::require(std::isfinite(rel_tol) && rel_tol > 0.0, "rel_tol must be finite and > 0");
}

ConvexFit weighted_lasso(const DataMatrix& x, const Eigen::Ref<const Vector>& y, double loss_weight,
                         const ConvexConfig& cfg) {
  cfg.validate();
  detail::require(y.size() == x.rows(), "lasso: response length mismatch");
  detail::require(std::isfinite(loss_weight) && loss_weight > 0.0, "lasso: loss weight must be > 0");
  const Problem p = prepare(x, y);
  LassoPath path = coordinate_descent(p.data.x, p.col_sq, p.data.y.col(0), loss_weight, cfg);

  ConvexFit fit;
  Matrix weights = path.coefficients;
  Vector biases = recover_biases(p.data, weights);
  fit.coefficients = CoefficientMatrix(std::move(weights), std::move(biases));
  fit.objective_trace = std::move(path.trace);
  fit.converged = path.converged;
  fit.iterations_used = path.iterations;
  return fit;
}

ConvexFit lasso(const DataMatrix& x, const Eigen::Ref<const Vector>& y, const ConvexConfig& cfg) {
  return weighted_lasso(x, y, 1.0, cfg);
}

ConvexFit solve_all_single_task(const DataMatrix& x, const IndicatorResponse& y, const ConvexConfig& cfg) {
  cfg.validate();
  const Problem p = prepare(x, y.matrix());
  const Vector w = y.task_weights();
  const Index d = x.cols();
  const Index tasks = y.tasks();

  Matrix weights(d, tasks);
  std::vector<LassoPath> paths;
  paths.reserve(static_cast<std::size_t>(tasks));
  for (Index l = 0; l < tasks; ++l) {
    paths.push_back(coordinate_descent(p.data.x, p.col_sq, p.data.y.col(l), w(l), cfg));
    weights.col(l) = paths.back().coefficients;
  }

  ConvexFit fit;
  fit.converged = true;
  std::size_t longest = 0;
  for (const auto& path : paths) {
    longest = std::max(longest, path.trace.size());
    fit.converged = fit.converged && path.converged;
    fit.iterations_used = std::max(fit.iterations_used, path.iterations);
  }
  // Tasks are independent; a finished task contributes its final value.
  fit.objective_trace.assign(longest, 0.0);
  for (const auto& path : paths) {
    for (std::size_t t = 0; t < longest; ++t) fit.objective_trace[t] += path.trace[std::min(t, path.trace.size() - 1)];
  }
  Vector biases = recover_biases(p.data, weights);
  fit.coefficients = CoefficientMatrix(std::move(weights), std::move(biases));
  return fit;
}

ConvexFit group_solver(const DataMatrix& x, const Eigen::Ref<const Matrix>& y, const Vector& task_weights,
                       const ConvexConfig& cfg) {
  cfg.validate();
  detail::require(task_weights.size() == y.cols(), "group_solver: task weight count mismatch");
  detail::require((task_weights.array() > 0.0).all() && task_weights.allFinite(),
                  "group_solver: task weights must be positive and finite");
  const Problem p = prepare(x, y);
  const Matrix& xc = p.data.x;
  const Matrix& yc = p.data.y;
  const Index d = xc.cols();
  const Index tasks = yc.cols();
  const Vector& w = task_weights;

  auto smooth = [&](const Matrix& c, Matrix& residual) {
    residual = yc - xc * c;
    return weighted_loss(residual, w);
  };

  // Monotone FISTA: momentum point `ahead`, accepted iterate `current`.
  Matrix current = Matrix::Zero(d, tasks);
  Matrix ahead = current;
  Matrix residual;
  double current_objective = smooth(current, residual) + cfg.lambda * row_penalty(current, cfg.q);
  double momentum = 1.0;
  int stalled = 0;

  double lipschitz = 1.0;
  if (cfg.step_rule == StepRule::Lipschitz) {
    // Power iteration underestimates sigma_max; 1% headroom keeps the step safe.
    lipschitz = 1.01 * 2.0 * spectral_norm_sq(xc) * w.maxCoeff();
    if (lipschitz == 0.0) lipschitz = 1.0;
  }

  ConvexFit fit;
  fit.objective_trace.push_back(current_objective);
  Matrix ahead_residual;
  Matrix trial_residual;
  for (Index iter = 1; iter <= cfg.max_iters; ++iter) {
    const double ahead_loss = smooth(ahead, ahead_residual);
    const Matrix gradient = group_gradient(xc, ahead_residual, w);

    Matrix trial;
    double trial_loss = 0.0;
    while (true) {
      trial = row_prox(ahead - gradient / lipschitz, cfg.lambda / lipschitz, cfg.q);
      trial_loss = smooth(trial, trial_residual);
      if (cfg.step_rule == StepRule::Lipschitz) break;
      const Matrix step = trial - ahead;
      const double model = ahead_loss + (gradient.array() * step.array()).sum() + 0.5 * lipschitz * step.squaredNorm();
      if (trial_loss <= model * (1.0 + 1e-14) + 1e-300) break;
      lipschitz *= 2.0;
      if (!std::isfinite(lipschitz)) throw NumericalError("group_solver: step size underflow in backtracking");
    }

    const double trial_objective = trial_loss + cfg.lambda * row_penalty(trial, cfg.q);
    // Gradient mapping at `ahead`; zero exactly at a minimizer.
    const double mapping = lipschitz * (ahead - trial).cwiseAbs().maxCoeff();
    const bool accepted = trial_objective <= current_objective;
    const double previous_objective = current_objective;
    fit.iterations_used = iter;

    if (accepted) {
      const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      const Matrix previous = current;
      current = trial;
      current_objective = trial_objective;
      ahead = current + ((momentum - 1.0) / next_momentum) * (current - previous);
      momentum = next_momentum;
      fit.objective_trace.push_back(current_objective);
      stalled = (current_objective == previous_objective) ? stalled + 1 : 0;
      if (relative_change_below(previous_objective, current_objective, cfg.rel_tol) &&
          (mapping <= 1e-9 * cfg.lambda || stalled >= 3)) {
        fit.converged = true;
        break;
      }
    } else {
      fit.objective_trace.push_back(current_objective);
      // A plain proximal step from an accepted iterate cannot increase the
      // objective in exact arithmetic, so rejecting one means the objective
      // is resolved to rounding level.
      if (momentum == 1.0) {
        fit.converged = true;
        break;
      }
      momentum = 1.0;
      ahead = current;
    }
  }

  Vector biases = recover_biases(p.data, current);
  fit.coefficients = CoefficientMatrix(std::move(current), std::move(biases));
  return fit;
}

ConvexFit group_solver(const DataMatrix& x, const IndicatorResponse& y, const ConvexConfig& cfg) {
  return group_solver(x, y.matrix(), y.task_weights(), cfg);
}

double lasso_lambda_max(const DataMatrix& x, const Eigen::Ref<const Vector>& y) {
  const Problem p = prepare(x, y);
  // Column dot products, summed exactly as the first coordinate-descent sweep does.
  double best = 0.0;
  for (Index j = 0; j < p.data.x.cols(); ++j) best = std::max(best, std::abs(p.data.x.col(j).dot(p.data.y.col(0))));
  return 2.0 * best;
}

double group_lambda_max(const DataMatrix& x, const IndicatorResponse& y, RowNorm q) {
  const Problem p = prepare(x, y.matrix());
  const Matrix g = group_gradient(p.data.x, p.data.y, y.task_weights());
  double best = 0.0;
  for (Index i = 0; i < g.rows(); ++i) {
    // Dual of the row norm: l1 for l_inf, l2 for l2.
    best = std::max(best, q == RowNorm::LInf ? g.row(i).cwiseAbs().sum() : g.row(i).norm());
  }
  return best;
}

double group_objective(const DataMatrix& x, const Eigen::Ref<const Matrix>& y, const Vector& task_weights,
                       const CoefficientMatrix& c, double lambda, RowNorm q) {
  detail::require(y.rows() == x.rows() && y.cols() == c.tasks() && c.features() == x.cols(),
                  "group_objective: shape mismatch");
  Matrix residual = y - x.values() * c.weights;
  residual.rowwise() -= c.biases.transpose();
  return weighted_loss(residual, task_weights) + lambda * row_penalty(c.weights, q);
}

CoefficientMatrix ridge_refit(const DataMatrix& x, const Eigen::Ref<const Matrix>& y, const SupportSet& support,
                              double alpha) {
  detail::require(!support.empty(), "ridge_refit: support is empty");
  detail::require(std::isfinite(alpha) && alpha > 0.0, "ridge_refit: alpha must be finite and > 0");
  const auto idx = support.sorted();
  for (Index j : idx) detail::require(j < x.cols(), "ridge_refit: support index out of range");

  const CenteredData data = center(x, y);
  const Index k = static_cast<Index>(idx.size());
  Matrix selected(x.rows(), k);
  for (Index s = 0; s < k; ++s) selected.col(s) = data.x.col(idx[static_cast<std::size_t>(s)]);

  Matrix system = selected.transpose() * selected;
  system.diagonal().array() += alpha;
  const Matrix solution = system.ldlt().solve(selected.transpose() * data.y);

  Matrix weights = Matrix::Zero(x.cols(), y.cols());
  for (Index s = 0; s < k; ++s) weights.row(idx[static_cast<std::size_t>(s)]) = solution.row(s);
  Vector biases = recover_biases(data, weights);
  return CoefficientMatrix(std::move(weights), std::move(biases));
}

CoefficientMatrix ridge_refit(const DataMatrix& x, const IndicatorResponse& y, const SupportSet& support,
                              double alpha) {
  return ridge_refit(x, y.matrix(), support, alpha);
}

SupportSet extract_support(const Eigen::Ref<const Matrix>& weights, Index budget, RowNorm q) {
  detail::require(budget >= 1, "extract_support: budget must be >= 1");
  const Index d = weights.rows();
  Vector norms(d);
  for (Index i = 0; i < d; ++i) {
    norms(i) = (q == RowNorm::LInf) ? weights.row(i).cwiseAbs().maxCoeff() : weights.row(i).norm();
  }
  SupportSet out;
  if (d == 0 || norms.maxCoeff() == 0.0) return out;
  const double eps = 1e-6 * norms.maxCoeff();

  std::vector<Index> rows;
  for (Index i = 0; i < d; ++i) {
    if (norms(i) > eps) rows.push_back(i);
  }
  std::stable_sort(rows.begin(), rows.end(), [&](Index a, Index b) { return norms(a) > norms(b); });
  if (static_cast<Index>(rows.size()) > budget) rows.resize(static_cast<std::size_t>(budget));
  for (Index i : rows) out.add(i);
  return out;
}

}  // namespace ssa
