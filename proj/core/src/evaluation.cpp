#include "ssa/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <string>

#include "ssa/errors.hpp"

namespace ssa {

using detail::require;

namespace {

void check_inputs(std::span<const double> scores, std::span<const char> positive) {
  require(scores.size() == positive.size(), "scores and labels differ in length");
  require(std::all_of(scores.begin(), scores.end(), [](double s) { return std::isfinite(s); }),
          "scores must be finite");
  const auto pos = std::count_if(positive.begin(), positive.end(), [](char p) { return p != 0; });
  require(pos >= 1 && pos < static_cast<std::ptrdiff_t>(positive.size()),
          "ROC needs at least one positive and one negative sample");
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("failed writing " + path.string());
}

}  // namespace

double trapezoid_area(const std::vector<RocPoint>& points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) * 0.5;
  }
  return area;
}

RocCurve roc_curve(std::span<const double> scores, std::span<const char> positive) {
  check_inputs(scores, positive);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  const auto total_pos = static_cast<std::size_t>(std::count_if(positive.begin(), positive.end(), [](char p) { return p != 0; }));
  const std::size_t total_neg = scores.size() - total_pos;

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  // Exact integer trapezoid sum: sum dFP * (TP_prev + TP), divided by 2PQ.
  double twice_area_counts = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    const std::size_t tp_prev = tp;
    const std::size_t fp_prev = fp;
    for (; i < order.size() && scores[order[i]] == s; ++i) {
      if (positive[order[i]]) ++tp; else ++fp;
    }
    twice_area_counts += static_cast<double>(fp - fp_prev) * static_cast<double>(tp + tp_prev);
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(total_neg),
                            static_cast<double>(tp) / static_cast<double>(total_pos)});
  }
  curve.auc = twice_area_counts / (2.0 * static_cast<double>(total_pos) * static_cast<double>(total_neg));
  return curve;
}

double auc_pairwise(std::span<const double> scores, std::span<const char> positive) {
  check_inputs(scores, positive);
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!positive[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (positive[j]) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

double tpr_at_fpr(const RocCurve& curve, double fpr) {
  require(fpr >= 0.0 && fpr <= 1.0, "fpr must lie in [0, 1]");
  require(!curve.points.empty(), "empty ROC curve");
  const auto& pts = curve.points;
  // Last point with pts.fpr <= fpr.
  const auto it = std::upper_bound(pts.begin(), pts.end(), fpr,
                                   [](double value, const RocPoint& p) { return value < p.fpr; });
  if (it == pts.begin()) return pts.front().tpr;
  const RocPoint& lo = *(it - 1);
  if (lo.fpr == fpr || it == pts.end()) return lo.tpr;
  const RocPoint& hi = *it;
  const double t = (fpr - lo.fpr) / (hi.fpr - lo.fpr);
  return lo.tpr + t * (hi.tpr - lo.tpr);
}

ProtocolSummary average_protocol(const std::vector<RocCurve>& curves, double grid_step, double operating_fpr) {
  require(!curves.empty(), "average_protocol needs at least one curve");
  require(grid_step > 0.0 && grid_step <= 1.0, "FPR grid step must lie in (0, 1]");
  const auto intervals = static_cast<std::size_t>(std::llround(1.0 / grid_step));
  require(intervals >= 1, "FPR grid step too large");

  ProtocolSummary out;
  out.operating_fpr = operating_fpr;
  out.persons = curves.size();
  out.fpr_grid.resize(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k) {
    out.fpr_grid[k] = static_cast<double>(k) / static_cast<double>(intervals);
  }

  std::vector<double> column(curves.size());
  for (double f : out.fpr_grid) {
    for (std::size_t c = 0; c < curves.size(); ++c) column[c] = tpr_at_fpr(curves[c], f);
    const double m = mean_of(column);
    out.tpr_mean.push_back(m);
    out.tpr_std.push_back(sample_std(column, m));
  }

  std::vector<double> aucs;
  std::vector<double> tprs;
  for (const auto& c : curves) {
    aucs.push_back(c.auc);
    tprs.push_back(tpr_at_fpr(c, operating_fpr));
  }
  out.auc_mean = mean_of(aucs);
  out.auc_std = sample_std(aucs, out.auc_mean);
  out.tpr_at_fpr_mean = mean_of(tprs);
  out.tpr_at_fpr_std = sample_std(tprs, out.tpr_at_fpr_mean);
  return out;
}

std::vector<RocCurve> per_person_curves(const Matrix& scores, std::span<const int> labels) {
  require(scores.rows() == static_cast<Index>(labels.size()), "score rows and test labels differ in count");
  std::vector<RocCurve> curves;
  std::vector<double> column(labels.size());
  std::vector<char> positive(labels.size());
  for (Index l = 0; l < scores.cols(); ++l) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      column[i] = scores(static_cast<Index>(i), l);
      positive[i] = labels[i] == l ? 1 : 0;
    }
    curves.push_back(roc_curve(column, positive));
  }
  return curves;
}

void write_roc_csv(const std::filesystem::path& path, const ProtocolSummary& summary) {
  std::string text = "fpr,tpr_mean,tpr_std\n";
  for (std::size_t k = 0; k < summary.fpr_grid.size(); ++k) {
    text += fmt(summary.fpr_grid[k]) + "," + fmt(summary.tpr_mean[k]) + "," + fmt(summary.tpr_std[k]) + "\n";
  }
  write_text(path, text);
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<MethodSummary>& rows) {
  std::string text = "method,tpr_at_0.1_mean,tpr_at_0.1_std,auc_mean,auc_std\n";
  for (const auto& row : rows) {
    const auto& s = row.summary;
    text += row.method + "," + fmt(s.tpr_at_fpr_mean) + "," + fmt(s.tpr_at_fpr_std) + "," + fmt(s.auc_mean) + "," +
            fmt(s.auc_std) + "\n";
  }
  write_text(path, text);
}

}  // namespace ssa
