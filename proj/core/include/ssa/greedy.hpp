#pragma once

// Greedy pursuit: OMP for one response vector, SOMP for a shared support
// across several responses.

#include <functional>
#include <string>
#include <vector>

#include "ssa/model.hpp"

namespace ssa {

/// How SOMP folds per-task correlations into one selection score.
enum class Aggregation { L1, L2, LInf };

struct GreedyConfig {
  Index max_features = 1;      // K
  double residual_tol = 0.0;   // stop once every task residual is at or below this
  bool normalize_columns = true;
  Aggregation aggregation = Aggregation::L1;

  /// Throws InputError unless 1 <= K <= min(N, d) and residual_tol is finite and >= 0.
  void validate(Index samples, Index features) const;
};

struct GreedyFit {
  SupportSet support;
  CoefficientMatrix coefficients;
  /// residual_norms[t](l): ||r_l|| after t selections; entry 0 is the centered response.
  std::vector<Vector> residual_norms;
  /// Selection score of the column chosen at each iteration.
  std::vector<double> scores;
  std::vector<std::string> warnings;
};

/// Called after each accepted selection with the support so far and the
/// current N x L residual matrix.
using GreedyObserver = std::function<void(const SupportSet&, const Matrix& residual)>;

GreedyFit omp(const DataMatrix& x, const Eigen::Ref<const Vector>& y, const GreedyConfig& cfg,
              const GreedyObserver& observer = {});

/// SOMP with task weights 1/N_l taken from the indicator response.
GreedyFit somp(const DataMatrix& x, const IndicatorResponse& y, const GreedyConfig& cfg,
               const GreedyObserver& observer = {});

/// SOMP over arbitrary real responses with explicit positive task weights.
GreedyFit somp(const DataMatrix& x, const Eigen::Ref<const Matrix>& y, const Vector& task_weights,
               const GreedyConfig& cfg, const GreedyObserver& observer = {});

/// Independent OMP per indicator column (the single-task baseline).
std::vector<GreedyFit> omp_per_task(const DataMatrix& x, const IndicatorResponse& y,
                                    const GreedyConfig& cfg);

}  // namespace ssa
