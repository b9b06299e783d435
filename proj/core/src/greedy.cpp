#include "ssa/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ssa/centering.hpp"
#include "ssa/errors.hpp"

namespace ssa {

namespace {

// A candidate whose component orthogonal to the selected span is this small
// relative to its own norm is treated as collinear and dropped.
constexpr double kCollinearTol = 1e-10;
// Centered columns this small relative to the raw column are constant.
constexpr double kConstantColumnTol = 1e-12;
// Residuals this small relative to the centered response are an exact fit.
constexpr double kExactFitTol = 1e-13;

double aggregate(const Eigen::Ref<const Eigen::RowVectorXd>& correlations, const Vector& weights,
                 Aggregation how) {
  switch (how) {
    case Aggregation::L1: {
      double s = 0.0;
      for (Index l = 0; l < correlations.size(); ++l) s += weights(l) * std::abs(correlations(l));
      return s;
    }
    case Aggregation::L2: {
      double s = 0.0;
      for (Index l = 0; l < correlations.size(); ++l) {
        const double t = weights(l) * correlations(l);
        s += t * t;
      }
      return std::sqrt(s);
    }
    case Aggregation::LInf: {
      double s = 0.0;
      for (Index l = 0; l < correlations.size(); ++l) s = std::max(s, weights(l) * std::abs(correlations(l)));
      return s;
    }
  }
  return 0.0;
}

GreedyFit pursue(const DataMatrix& x, const Eigen::Ref<const Matrix>& responses, const Vector& task_weights,
                 const GreedyConfig& cfg, const GreedyObserver& observer) {
  const Index n = x.rows();
  const Index d = x.cols();
  const Index tasks = responses.cols();
  cfg.validate(n, d);
  detail::require(tasks >= 1, "greedy pursuit needs at least one response column");
  detail::require(task_weights.size() == tasks, "task weight count mismatch");
  detail::require((task_weights.array() > 0.0).all() && task_weights.allFinite(),
                  "task weights must be positive and finite");

  const CenteredData data = center(x, responses);

  // Weights rescaled so the largest is exactly one; a single task then scores
  // with weight 1 regardless of N_1, and argmax is unaffected.
  const Vector unit_weights = task_weights / task_weights.maxCoeff();

  const Vector raw_norms = x.values().colwise().norm().transpose();
  const Vector norms = data.x.colwise().norm().transpose();
  std::vector<char> excluded(static_cast<std::size_t>(d), 0);
  Vector inv_norm(d);
  for (Index j = 0; j < d; ++j) {
    if (norms(j) <= kConstantColumnTol * raw_norms(j) || norms(j) == 0.0) {
      excluded[static_cast<std::size_t>(j)] = 1;
      inv_norm(j) = 0.0;
    } else {
      inv_norm(j) = cfg.normalize_columns ? 1.0 / norms(j) : 1.0;
    }
  }

  GreedyFit fit;
  Matrix residual = data.y;
  Matrix correlations = data.x.transpose() * residual;  // d x L, kept in sync with residual
  Matrix basis(n, cfg.max_features);
  Index rank = 0;
  fit.residual_norms.push_back(residual.colwise().norm().transpose());
  const Vector exact_fit = kExactFitTol * fit.residual_norms.front();

  while (static_cast<Index>(fit.support.size()) < cfg.max_features) {
    if (fit.residual_norms.back().maxCoeff() <= cfg.residual_tol) break;
    if ((fit.residual_norms.back().array() <= exact_fit.array()).all()) break;

    Vector score(d);
    for (Index j = 0; j < d; ++j) {
      score(j) = excluded[static_cast<std::size_t>(j)]
                     ? -1.0
                     : inv_norm(j) * aggregate(correlations.row(j), unit_weights, cfg.aggregation);
    }

    Index chosen = -1;
    Vector q;
    while (true) {
      Index best = -1;
      for (Index j = 0; j < d; ++j) {
        if (score(j) < 0.0) continue;
        if (best < 0 || score(j) > score(best)) best = j;  // strict: smallest index wins ties
      }
      if (best < 0 || score(best) == 0.0) break;

      const auto column = data.x.col(best);
      q = column;
      if (rank > 0) {
        const auto selected = basis.leftCols(rank);
        q -= selected * (selected.transpose() * q);
        q -= selected * (selected.transpose() * q);
      }
      const double qn = q.norm();
      if (qn <= kCollinearTol * norms(best)) {
        excluded[static_cast<std::size_t>(best)] = 1;
        score(best) = -1.0;
        fit.warnings.push_back("feature " + std::to_string(best) +
                               " dropped: collinear with the selected columns");
        continue;
      }
      q /= qn;
      chosen = best;
      break;
    }
    if (chosen < 0) {
      if (fit.support.size() < static_cast<std::size_t>(cfg.max_features)) {
        fit.warnings.push_back("stopped after " + std::to_string(fit.support.size()) +
                               " features: no remaining column correlates with the residual");
      }
      break;
    }

    basis.col(rank++) = q;
    fit.support.add(chosen);
    excluded[static_cast<std::size_t>(chosen)] = 1;
    fit.scores.push_back((cfg.normalize_columns ? 1.0 / norms(chosen) : 1.0) *
                         aggregate(correlations.row(chosen), task_weights, cfg.aggregation));

    const Eigen::RowVectorXd projection = q.transpose() * residual;
    residual.noalias() -= q * projection;
    correlations.noalias() -= (data.x.transpose() * q) * projection;

    fit.residual_norms.push_back(residual.colwise().norm().transpose());
    if (observer) observer(fit.support, residual);
  }

  Matrix weights = Matrix::Zero(d, tasks);
  if (!fit.support.empty()) {
    const auto& idx = fit.support.indices();
    Matrix selected(n, static_cast<Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) selected.col(static_cast<Index>(k)) = data.x.col(idx[k]);
    const Matrix solution = selected.colPivHouseholderQr().solve(data.y);
    for (std::size_t k = 0; k < idx.size(); ++k) weights.row(idx[k]) = solution.row(static_cast<Index>(k));
  }
  Vector biases = recover_biases(data, weights);
  fit.coefficients = CoefficientMatrix(std::move(weights), std::move(biases));
  return fit;
}

}  // namespace

void GreedyConfig::validate(Index samples, Index features) const {
  detail::require(max_features >= 1, "greedy budget K must be at least 1");
  detail::require(max_features <= std::min(samples, features),
                  "greedy budget K=" + std::to_string(max_features) + " exceeds min(N, d)=" +
                      std::to_string(std::min(samples, features)));
  detail::require(std::isfinite(residual_tol) && residual_tol >= 0.0, "residual_tol must be finite and >= 0");
}

GreedyFit omp(const DataMatrix& x, const Eigen::Ref<const Vector>& y, const GreedyConfig& cfg,
              const GreedyObserver& observer) {
  detail::require(y.size() == x.rows(), "omp: response length mismatch");
  return pursue(x, y, Vector::Ones(1), cfg, observer);
}

GreedyFit somp(const DataMatrix& x, const IndicatorResponse& y, const GreedyConfig& cfg,
               const GreedyObserver& observer) {
  return pursue(x, y.matrix(), y.task_weights(), cfg, observer);
}

GreedyFit somp(const DataMatrix& x, const Eigen::Ref<const Matrix>& y, const Vector& task_weights,
               const GreedyConfig& cfg, const GreedyObserver& observer) {
  return pursue(x, y, task_weights, cfg, observer);
}

std::vector<GreedyFit> omp_per_task(const DataMatrix& x, const IndicatorResponse& y, const GreedyConfig& cfg) {
  std::vector<GreedyFit> fits;
  fits.reserve(static_cast<std::size_t>(y.tasks()));
  for (Index l = 0; l < y.tasks(); ++l) fits.push_back(omp(x, y.column(l), cfg));
  return fits;
}

}  // namespace ssa
