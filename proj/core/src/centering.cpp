#include "ssa/centering.hpp"

#include "ssa/errors.hpp"

namespace ssa {

CenteredData center(const DataMatrix& x, const Eigen::Ref<const Matrix>& y) {
  detail::require(y.rows() == x.rows(), "response has " + std::to_string(y.rows()) +
                                            " rows, data has " + std::to_string(x.rows()));
  detail::require(y.allFinite(), "response contains non-finite entries");
  CenteredData out;
  out.x = x.values();
  out.x_mean = out.x.colwise().mean().transpose();
  out.x.rowwise() -= out.x_mean.transpose();
  out.y = y;
  out.y_mean = out.y.colwise().mean().transpose();
  out.y.rowwise() -= out.y_mean.transpose();
  return out;
}

Vector recover_biases(const CenteredData& data, const Eigen::Ref<const Matrix>& weights) {
  return data.y_mean - weights.transpose() * data.x_mean;
}

}  // namespace ssa
