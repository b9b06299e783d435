#pragma once

// Data model and linear prediction primitives shared by every solver.
//
// Notation follows the usual regression layout: X is N x d (one sample per
// row), Y is the N x L indicator response, C is d x L with one task per
// column and b holds one bias per task.

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ssa {

using Index = Eigen::Index;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Dense N x d feature matrix, row-major, all entries finite.
class DataMatrix {
 public:
  explicit DataMatrix(RowMatrix values);

  Index rows() const noexcept { return values_.rows(); }
  Index cols() const noexcept { return values_.cols(); }
  const RowMatrix& values() const noexcept { return values_; }

  /// Strided view of dictionary column j.
  auto column(Index j) const { return values_.col(j); }
  auto row(Index i) const { return values_.row(i); }

 private:
  RowMatrix values_;
};

/// N x L 0/1 matrix with at most one 1 per row. All-zero rows are
/// background samples that belong to none of the L classes.
class IndicatorResponse {
 public:
  /// Validates a raw 0/1 matrix. Every class must have a positive.
  explicit IndicatorResponse(Matrix matrix);

  Index rows() const noexcept { return matrix_.rows(); }
  Index tasks() const noexcept { return matrix_.cols(); }
  const Matrix& matrix() const noexcept { return matrix_; }
  auto column(Index l) const { return matrix_.col(l); }

  const std::vector<Index>& class_counts() const noexcept { return class_counts_; }
  /// Loss weights 1/N_l.
  Vector task_weights() const;

 private:
  Matrix matrix_;
  std::vector<Index> class_counts_;
};

struct CoefficientMatrix {
  Matrix weights;  // d x L
  Vector biases;   // L

  CoefficientMatrix() = default;
  CoefficientMatrix(Matrix w, Vector b);

  static CoefficientMatrix zeros(Index features, Index tasks);

  Index features() const noexcept { return weights.rows(); }
  Index tasks() const noexcept { return weights.cols(); }
};

/// Ordered, duplicate-free list of feature indices. Insertion order is the
/// selection order of the greedy solvers.
class SupportSet {
 public:
  SupportSet() = default;
  explicit SupportSet(std::vector<Index> indices);

  void add(Index j);
  bool contains(Index j) const;

  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  const std::vector<Index>& indices() const noexcept { return indices_; }
  std::vector<Index> sorted() const;

  auto begin() const noexcept { return indices_.begin(); }
  auto end() const noexcept { return indices_.end(); }

  friend bool operator==(const SupportSet&, const SupportSet&) = default;

 private:
  std::vector<Index> indices_;
};

using Label = std::optional<int>;

IndicatorResponse build_indicator(std::span<const Label> labels, int num_classes);

/// score(i, l) = x_i . c_l + b_l
Matrix predict(const DataMatrix& x, const CoefficientMatrix& c);

/// || y - X c - b 1 ||_2^2
double squared_error(const DataMatrix& x, const Eigen::Ref<const Vector>& y,
                     const Eigen::Ref<const Vector>& c, double bias);

/// sum_l (1 / N_l) * Err(c_l, b_l)
double multitask_loss(const DataMatrix& x, const IndicatorResponse& y,
                      const CoefficientMatrix& c);

/// Number of rows with any exactly-nonzero entry.
Index row_l0(const CoefficientMatrix& c);
Index row_l0(const Eigen::Ref<const Matrix>& weights);

/// Rows whose largest magnitude exceeds eps.
Index row_l0_eps(const CoefficientMatrix& c, double eps = 1e-10);

/// sum_i ||c^i||_q^p with p in (0, 1] and q in (1, inf].
double mixed_norm(const CoefficientMatrix& c, double p, double q);
double mixed_norm(const Eigen::Ref<const Matrix>& weights, double p, double q);

/// l_q norm of one vector, q in [1, inf].
double lq_norm(const Eigen::Ref<const Vector>& v, double q);

}  // namespace ssa
