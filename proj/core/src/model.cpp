#include "ssa/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ssa/errors.hpp"

namespace ssa {

using detail::require;

DataMatrix::DataMatrix(RowMatrix values) : values_(std::move(values)) {
  require(values_.rows() >= 1 && values_.cols() >= 1, "data matrix must be at least 1x1");
  require(values_.allFinite(), "data matrix contains non-finite entries");
}

IndicatorResponse::IndicatorResponse(Matrix matrix) : matrix_(std::move(matrix)) {
  require(matrix_.rows() >= 1 && matrix_.cols() >= 1, "indicator matrix must be at least 1x1");
  class_counts_.assign(static_cast<std::size_t>(matrix_.cols()), 0);
  for (Index i = 0; i < matrix_.rows(); ++i) {
    int ones = 0;
    for (Index l = 0; l < matrix_.cols(); ++l) {
      const double v = matrix_(i, l);
      require(v == 0.0 || v == 1.0, "indicator entries must be 0 or 1");
      if (v == 1.0) {
        ++ones;
        ++class_counts_[static_cast<std::size_t>(l)];
      }
    }
    require(ones <= 1, "indicator row " + std::to_string(i) + " has more than one class");
  }
  for (std::size_t l = 0; l < class_counts_.size(); ++l) {
    require(class_counts_[l] >= 1, "class " + std::to_string(l) + " has zero positives");
  }
}

Vector IndicatorResponse::task_weights() const {
  Vector w(tasks());
  for (Index l = 0; l < tasks(); ++l) w(l) = 1.0 / static_cast<double>(class_counts_[l]);
  return w;
}

CoefficientMatrix::CoefficientMatrix(Matrix w, Vector b) : weights(std::move(w)), biases(std::move(b)) {
  require(weights.cols() == biases.size(), "coefficient matrix and bias vector disagree on task count");
  require(weights.allFinite() && biases.allFinite(), "coefficients must be finite");
}

CoefficientMatrix CoefficientMatrix::zeros(Index features, Index tasks) {
  return CoefficientMatrix(Matrix::Zero(features, tasks), Vector::Zero(tasks));
}

SupportSet::SupportSet(std::vector<Index> indices) {
  for (Index j : indices) add(j);
}

void SupportSet::add(Index j) {
  require(j >= 0, "negative feature index");
  require(!contains(j), "feature " + std::to_string(j) + " already in support");
  indices_.push_back(j);
}

bool SupportSet::contains(Index j) const {
  return std::find(indices_.begin(), indices_.end(), j) != indices_.end();
}

std::vector<Index> SupportSet::sorted() const {
  auto out = indices_;
  std::sort(out.begin(), out.end());
  return out;
}

IndicatorResponse build_indicator(std::span<const Label> labels, int num_classes) {
  require(num_classes >= 1, "need at least one class");
  require(!labels.empty(), "need at least one sample");
  Matrix y = Matrix::Zero(static_cast<Index>(labels.size()), num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels[i]) continue;
    const int l = *labels[i];
    require(l >= 0 && l < num_classes, "class id " + std::to_string(l) + " out of range");
    y(static_cast<Index>(i), l) = 1.0;
  }
  return IndicatorResponse(std::move(y));
}

Matrix predict(const DataMatrix& x, const CoefficientMatrix& c) {
  require(x.cols() == c.features(), "predict: data has " + std::to_string(x.cols()) +
                                        " features, model has " + std::to_string(c.features()));
  Matrix scores = x.values() * c.weights;
  scores.rowwise() += c.biases.transpose();
  return scores;
}

double squared_error(const DataMatrix& x, const Eigen::Ref<const Vector>& y,
                     const Eigen::Ref<const Vector>& c, double bias) {
  require(y.size() == x.rows(), "squared_error: response length mismatch");
  require(c.size() == x.cols(), "squared_error: coefficient length mismatch");
  Vector r = y - x.values() * c;
  r.array() -= bias;
  return r.squaredNorm();
}

double multitask_loss(const DataMatrix& x, const IndicatorResponse& y, const CoefficientMatrix& c) {
  require(y.rows() == x.rows(), "multitask_loss: sample count mismatch");
  require(c.features() == x.cols() && c.tasks() == y.tasks(), "multitask_loss: coefficient shape mismatch");
  double total = 0.0;
  for (Index l = 0; l < y.tasks(); ++l) {
    const double n_l = static_cast<double>(y.class_counts()[static_cast<std::size_t>(l)]);
    total += squared_error(x, y.column(l), c.weights.col(l), c.biases(l)) / n_l;
  }
  return total;
}

Index row_l0(const Eigen::Ref<const Matrix>& weights) {
  Index count = 0;
  for (Index i = 0; i < weights.rows(); ++i) {
    if ((weights.row(i).array() != 0.0).any()) ++count;
  }
  return count;
}

Index row_l0(const CoefficientMatrix& c) { return row_l0(c.weights); }

Index row_l0_eps(const CoefficientMatrix& c, double eps) {
  require(eps >= 0.0, "row_l0_eps: eps must be non-negative");
  Index count = 0;
  for (Index i = 0; i < c.weights.rows(); ++i) {
    if (c.weights.cols() > 0 && c.weights.row(i).cwiseAbs().maxCoeff() > eps) ++count;
  }
  return count;
}

double lq_norm(const Eigen::Ref<const Vector>& v, double q) {
  if (v.size() == 0) return 0.0;
  if (std::isinf(q)) return v.cwiseAbs().maxCoeff();
  if (q == 1.0) return v.cwiseAbs().sum();
  if (q == 2.0) return v.norm();
  // Scale by the max magnitude so large q does not overflow.
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return scale * std::pow((v.cwiseAbs() / scale).array().pow(q).sum(), 1.0 / q);
}

double mixed_norm(const Eigen::Ref<const Matrix>& weights, double p, double q) {
  require(p > 0.0 && p <= 1.0, "mixed_norm: p must lie in (0, 1]");
  require(q > 1.0, "mixed_norm: q must lie in (1, inf]");
  double total = 0.0;
  for (Index i = 0; i < weights.rows(); ++i) {
    const double r = lq_norm(weights.row(i).transpose(), q);
    total += (p == 1.0) ? r : std::pow(r, p);
  }
  return total;
}

double mixed_norm(const CoefficientMatrix& c, double p, double q) { return mixed_norm(c.weights, p, q); }

}  // namespace ssa
