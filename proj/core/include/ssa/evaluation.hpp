#pragma once

// Verification scoring: ROC curves, AUC, TPR at a fixed FPR and the
// per-person averaging protocol.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ssa/model.hpp"

namespace ssa {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // (0,0) ... (1,1), both coordinates non-decreasing
  double auc = 0.0;
};

/// Threshold sweep over distinct scores, descending. Samples with equal
/// scores move together, so ties contribute a diagonal segment.
RocCurve roc_curve(std::span<const double> scores, std::span<const char> positive);

/// Mann-Whitney form: (#{pos > neg} + 0.5 #{pos == neg}) / (P Q).
double auc_pairwise(std::span<const double> scores, std::span<const char> positive);

/// Linear interpolation on the curve. Where the curve is vertical at `fpr`
/// the highest TPR is returned.
double tpr_at_fpr(const RocCurve& curve, double fpr);

/// Trapezoidal area under a point sequence.
double trapezoid_area(const std::vector<RocPoint>& points);

struct ProtocolSummary {
  std::vector<double> fpr_grid;
  std::vector<double> tpr_mean;
  std::vector<double> tpr_std;
  double auc_mean = 0.0;
  double auc_std = 0.0;
  double tpr_at_fpr_mean = 0.0;  // at `operating_fpr`
  double tpr_at_fpr_std = 0.0;
  double operating_fpr = 0.1;
  std::size_t persons = 0;
};

/// Averages per-person curves on a uniform FPR grid (0 to 1, `grid_step`) and
/// reports mean and sample standard deviation of the per-person AUC and
/// TPR at `operating_fpr`.
ProtocolSummary average_protocol(const std::vector<RocCurve>& curves, double grid_step = 0.001,
                                 double operating_fpr = 0.1);

/// One curve per person l: positives are test samples labelled l, negatives
/// every other test sample. `scores` is M x L.
std::vector<RocCurve> per_person_curves(const Matrix& scores, std::span<const int> labels);

/// Columns: fpr,tpr_mean,tpr_std
void write_roc_csv(const std::filesystem::path& path, const ProtocolSummary& summary);

struct MethodSummary {
  std::string method;
  ProtocolSummary summary;
};

/// Columns: method,tpr_at_0.1_mean,tpr_at_0.1_std,auc_mean,auc_std
void write_summary_csv(const std::filesystem::path& path, const std::vector<MethodSummary>& rows);

}  // namespace ssa
