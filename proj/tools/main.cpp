// ssa: synthetic data, Gabor extraction, sparse feature selection and
// verification reports.
//
// Exit codes: 0 success, 2 bad input, 3 numerical failure.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "ssa/errors.hpp"

namespace {

using namespace ssa::cli;

constexpr int kExitBadInput = 2;
constexpr int kExitNumerical = 3;

// Expands `--config FILE` into `--key=value` arguments for every key the
// command line does not already set, so explicit flags win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (config.empty()) return args;

  std::ifstream in(config);
  if (!in) throw ssa::InputError("cannot open config file " + config);
  std::set<std::string> given;
  for (const auto& a : args) {
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  }
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ssa::InputError(config + ": expected key=value, got '" + line + "'");
    auto key = line.substr(first, eq - first);
    auto value = line.substr(eq + 1);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    const auto vstart = value.find_first_not_of(" \t");
    value = vstart == std::string::npos ? std::string() : value.substr(vstart);
    while (!value.empty() && (value.back() == ' ' || value.back() == '\r' || value.back() == '\t')) value.pop_back();
    if (!given.count(key)) args.push_back("--" + key + "=" + value);
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse multi-task feature selection and verification toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  app.add_option("--config", "key=value file; each key names a long flag, explicit flags win");

  // synth
  SynthOptions synth;
  std::string synth_kind = "classification";
  std::string synth_snr = "1";
  auto* sub_synth = app.add_subcommand("synth", "Generate a planted-support synthetic dataset");
  sub_synth->add_option("--kind", synth_kind, "classification or regression")
      ->check(CLI::IsMember({"classification", "regression"}))
      ->capture_default_str();
  sub_synth->add_option("--samples", synth.spec.samples, "Samples N (regression)")->capture_default_str();
  sub_synth->add_option("--features", synth.spec.features, "Feature dimension d")->default_val(2000);
  sub_synth->add_option("--tasks", synth.spec.tasks, "Tasks / known persons L")->default_val(158);
  sub_synth->add_option("--support", synth.spec.support, "Planted support size k")->default_val(40);
  sub_synth->add_option("--share-fraction", synth.spec.share_fraction, "Fraction of k shared by all tasks")
      ->default_val(0.75);
  sub_synth->add_option("--snr", synth_snr, "Signal-to-noise ratio, or inf")->capture_default_str();
  sub_synth->add_option("--seed", synth.spec.seed, "Random seed")->capture_default_str();
  sub_synth->add_option("--per-class", synth.per_class, "Training positives per class")->capture_default_str();
  sub_synth->add_option("--background", synth.background, "Background training samples")->capture_default_str();
  sub_synth->add_option("--test-per-class", synth.test_per_class, "Test samples per class")->capture_default_str();
  sub_synth->add_option("--out-dir", synth.out_dir, "Output directory")->capture_default_str();

  // extract
  ExtractOptions extract;
  auto* sub_extract = app.add_subcommand("extract", "Align, crop and extract Gabor features from a manifest");
  sub_extract->add_option("--manifest", extract.manifest, "CSV: image_path,left_x,left_y,right_x,right_y,class_id")
      ->required();
  sub_extract->add_option("--scales", extract.scales, "Gabor scales")->capture_default_str();
  sub_extract->add_option("--orientations", extract.orientations, "Gabor orientations")->capture_default_str();
  sub_extract->add_option("--crop", extract.crop, "Crop side in pixels")->capture_default_str();
  sub_extract->add_option("--kernel-size", extract.gabor.kernel_size, "Odd kernel window")->capture_default_str();
  sub_extract->add_option("--k-max", extract.gabor.k_max, "Highest spatial frequency")->capture_default_str();
  sub_extract->add_option("--spacing", extract.gabor.spacing, "Frequency ratio between scales")->capture_default_str();
  sub_extract->add_option("--sigma", extract.gabor.sigma, "Envelope width relative to wavelength")
      ->capture_default_str();
  sub_extract->add_option("--out-dir", extract.out_dir, "Output directory")->capture_default_str();

  // select-train
  TrainOptions train;
  std::string method = "mtl-somp";
  std::string refit = "none";
  std::string q = "inf";
  auto* sub_train = app.add_subcommand("select-train", "Select features and fit per-person models");
  sub_train->add_option("--method", method, "stl-omp | mtl-somp | stl-lasso | mtl-group")
      ->check(CLI::IsMember({"stl-omp", "mtl-somp", "stl-lasso", "mtl-group"}))
      ->capture_default_str();
  sub_train->add_option("--refit", refit, "none | ridge")->check(CLI::IsMember({"none", "ridge"}))->capture_default_str();
  sub_train->add_option("--budget", train.budget, "Feature budget K")->capture_default_str();
  sub_train->add_option("--lambda", train.lambda, "Penalty for convex methods")->capture_default_str();
  sub_train->add_option("--alpha", train.alpha, "Ridge penalty for --refit ridge")->capture_default_str();
  sub_train->add_option("--q", q, "Row norm for mtl-group: 2 | inf")->check(CLI::IsMember({"2", "inf"}))
      ->capture_default_str();
  sub_train->add_option("--rel-tol", train.rel_tol, "Relative objective tolerance")->capture_default_str();
  sub_train->add_option("--max-iters", train.max_iters, "Iteration cap for convex methods")->capture_default_str();
  sub_train->add_option("--seed", train.seed, "Seed echoed into the model")->capture_default_str();
  sub_train->add_option("--train-x", train.train_x, "Training features (.bin or .csv)")->required();
  sub_train->add_option("--train-labels", train.train_labels, "Training labels CSV")->required();
  std::filesystem::path train_out_dir = ".";
  sub_train->add_option("--out-dir", train_out_dir, "Directory for model.txt")->capture_default_str();

  // evaluate
  EvaluateOptions eval;
  auto* sub_eval = app.add_subcommand("evaluate", "Score test data and write ROC/AUC reports");
  sub_eval->add_option("--model", eval.model, "Model file from select-train")->required();
  sub_eval->add_option("--test-x", eval.test_x, "Test features (.bin or .csv)")->required();
  sub_eval->add_option("--test-labels", eval.test_labels, "Test labels CSV")->required();
  sub_eval->add_option("--fpr-grid-step", eval.fpr_grid_step, "Step of the averaged ROC grid")->capture_default_str();
  sub_eval->add_option("--out-dir", eval.out_dir, "Output directory")->capture_default_str();

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadInput;
  } catch (const ssa::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }

  try {
    if (*sub_synth) {
      synth.kind = synth_kind == "regression" ? SynthKind::Regression : SynthKind::Classification;
      synth.spec.snr = synth_snr == "inf" ? std::numeric_limits<double>::infinity() : std::stod(synth_snr);
      std::cout << cmd_synth(synth);
    } else if (*sub_extract) {
      const auto rows = cmd_extract(extract);
      std::cout << "extracted " << rows << " feature rows into " << extract.out_dir.string() << "\n";
    } else if (*sub_train) {
      train.method = parse_method(method);
      train.ridge = refit == "ridge";
      train.q = parse_row_norm(q);
      train.model_out = train_out_dir / "model.txt";
      const Model model = cmd_select_train(train);
      for (const auto& w : model.warnings) std::cerr << "warning: " << w << "\n";
      std::size_t selected = 0;
      for (const auto& s : model.supports) selected = std::max(selected, s.size());
      std::cout << "method=" << method_label(model.method, model.ridge) << " supports=" << model.supports.size()
                << " max_support=" << selected << " model=" << train.model_out.string() << "\n";
    } else if (*sub_eval) {
      const auto summary = cmd_evaluate(eval);
      std::cout << "persons=" << summary.persons << " auc_mean=" << summary.auc_mean
                << " tpr_at_0.1_mean=" << summary.tpr_at_fpr_mean << "\n";
    }
  } catch (const ssa::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
