#pragma once

// Pipeline commands behind the `ssa` executable. Each command is a plain
// function so tests can drive the same code paths without a subprocess.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ssa/convex.hpp"
#include "ssa/evaluation.hpp"
#include "ssa/gabor.hpp"
#include "ssa/greedy.hpp"
#include "ssa/synth.hpp"

namespace ssa::cli {

namespace fs = std::filesystem;

enum class Method { StlOmp, MtlSomp, StlLasso, MtlGroup };

Method parse_method(const std::string& name);
std::string method_name(Method m);
/// Report label: STL, MTL, STL-LASSO, MTL-GROUP, with "+R" after a ridge refit.
std::string method_label(Method m, bool ridge);

RowNorm parse_row_norm(const std::string& q);
std::string row_norm_name(RowNorm q);

// synth

enum class SynthKind { Classification, Regression };

struct SynthOptions {
  SynthKind kind = SynthKind::Classification;
  SynthSpec spec{};
  Index per_class = 5;
  Index background = 210;
  Index test_per_class = 5;
  fs::path out_dir = "ssa-data";
};

/// Writes the dataset files plus manifest.txt; returns the manifest text.
std::string cmd_synth(const SynthOptions& opts);

// extract

struct ExtractOptions {
  fs::path manifest;
  fs::path out_dir = "ssa-features";
  int scales = 5;
  int orientations = 8;
  int crop = 64;
  GaborParams gabor{};
};

/// One manifest row: image_path,left_x,left_y,right_x,right_y,class_id ("-" for background).
struct ManifestEntry {
  fs::path image;
  Point eye_left;
  Point eye_right;
  Label label;
};

std::vector<ManifestEntry> read_manifest(const fs::path& manifest);

/// Writes features.bin (one row per image) and labels.csv; returns the row count.
Index cmd_extract(const ExtractOptions& opts);

// select-train

struct TrainOptions {
  Method method = Method::MtlSomp;
  bool ridge = false;
  double alpha = 1.0;
  Index budget = 300;
  double lambda = 0.1;
  RowNorm q = RowNorm::LInf;
  double rel_tol = 1e-10;
  Index max_iters = 20000;
  std::uint64_t seed = 42;
  fs::path train_x;
  fs::path train_labels;
  fs::path model_out = "model.txt";
};

struct Model {
  Method method = Method::MtlSomp;
  bool ridge = false;
  double alpha = 1.0;
  Index budget = 0;
  double lambda = 0.0;
  RowNorm q = RowNorm::LInf;
  double rel_tol = 0.0;
  Index max_iters = 0;
  std::uint64_t seed = 0;
  bool converged = true;
  std::vector<std::string> warnings;
  /// One shared support (MTL methods) or one per task (STL methods).
  std::vector<SupportSet> supports;
  CoefficientMatrix coefficients;

  bool shared_support() const { return method == Method::MtlSomp || method == Method::MtlGroup; }
};

Model train_model(const DataMatrix& x, const std::vector<Label>& labels, const TrainOptions& opts);
void write_model(const fs::path& path, const Model& model);
Model read_model(const fs::path& path);

Model cmd_select_train(const TrainOptions& opts);

// evaluate

struct EvaluateOptions {
  fs::path model;
  fs::path test_x;
  fs::path test_labels;
  fs::path out_dir = "ssa-report";
  double fpr_grid_step = 0.001;
};

/// Scores of every test sample for every task using only the stored support.
Matrix score_with_model(const Model& model, const DataMatrix& x);

/// Writes summary.csv and roc.csv into out_dir.
ProtocolSummary cmd_evaluate(const EvaluateOptions& opts);

/// Loads a matrix by extension: .csv as text, anything else as SSA1 binary.
DataMatrix load_data(const fs::path& path);

}  // namespace ssa::cli
