#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "ssa/convex.hpp"
#include "ssa/errors.hpp"

namespace ssa {

Vector project_l1_ball(const Eigen::Ref<const Vector>& v, double radius) {
  detail::require(radius >= 0.0, "project_l1_ball: radius must be non-negative");
  const Vector magnitudes = v.cwiseAbs();
  if (magnitudes.sum() <= radius) return v;
  if (radius == 0.0) return Vector::Zero(v.size());

  // Sort-based threshold search: theta is the soft threshold that leaves
  // exactly `radius` of l1 mass.
  std::vector<double> sorted(magnitudes.data(), magnitudes.data() + magnitudes.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    cumulative += sorted[j];
    const double candidate = (cumulative - radius) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) theta = candidate;
  }

  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double shrunk = std::max(magnitudes(i) - theta, 0.0);
    out(i) = std::copysign(shrunk, v(i));
  }
  return out;
}

Vector prox_row_linf(const Eigen::Ref<const Vector>& v, double t) {
  detail::require(std::isfinite(t) && t >= 0.0, "prox_row_linf: t must be finite and non-negative");
  return v - project_l1_ball(v, t);
}

Vector prox_row_l2(const Eigen::Ref<const Vector>& v, double t) {
  detail::require(std::isfinite(t) && t >= 0.0, "prox_row_l2: t must be finite and non-negative");
  const double norm = v.norm();
  if (norm <= t) return Vector::Zero(v.size());
  return (1.0 - t / norm) * v;
}

}  // namespace ssa
