#pragma once

// Column centering used by every fitting routine. The bias of each task is
// never penalized, so fitting on centered data and recovering
// b_l = mean(y_l) - mean(X) . c_l afterwards is exact.

#include "ssa/model.hpp"

namespace ssa {

struct CenteredData {
  Matrix x;            // N x d, column-major, zero-mean columns
  Vector x_mean;       // d
  Matrix y;            // N x L, zero-mean columns
  Vector y_mean;       // L
};

CenteredData center(const DataMatrix& x, const Eigen::Ref<const Matrix>& y);

/// Biases recovered from the centering means for a fitted d x L weight matrix.
Vector recover_biases(const CenteredData& data, const Eigen::Ref<const Matrix>& weights);

}  // namespace ssa
