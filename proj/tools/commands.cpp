#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "ssa/centering.hpp"
#include "ssa/errors.hpp"
#include "ssa/image_io.hpp"
#include "ssa/matrix_io.hpp"

namespace ssa::cli {

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(s);
  while (std::getline(in, field, sep)) out.push_back(trim(field));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError(where + ": bad number '" + s + "'");
  }
  return v;
}

long long to_int(const std::string& s, const std::string& where) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError(where + ": bad integer '" + s + "'");
  }
  return v;
}

std::string join(const std::vector<Index>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out.push_back(' ');
    out += std::to_string(v[i]);
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("failed writing " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create directory " + dir.string() + ": " + ec.message());
}

int num_classes(const std::vector<Label>& labels) {
  int top = -1;
  for (const auto& l : labels) {
    if (l) top = std::max(top, *l);
  }
  if (top < 0) throw InputError("training labels contain no known class");
  return top + 1;
}

// Keeps only `support` rows of column `task` (or of every column when task < 0).
void restrict_rows(Matrix& weights, const SupportSet& support, Index task) {
  std::vector<char> keep(static_cast<std::size_t>(weights.rows()), 0);
  for (Index j : support) keep[static_cast<std::size_t>(j)] = 1;
  for (Index i = 0; i < weights.rows(); ++i) {
    if (keep[static_cast<std::size_t>(i)]) continue;
    if (task < 0) weights.row(i).setZero();
    else weights(i, task) = 0.0;
  }
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "stl-omp") return Method::StlOmp;
  if (name == "mtl-somp") return Method::MtlSomp;
  if (name == "stl-lasso") return Method::StlLasso;
  if (name == "mtl-group") return Method::MtlGroup;
  throw InputError("unknown method '" + name + "' (expected stl-omp, mtl-somp, stl-lasso or mtl-group)");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::StlOmp: return "stl-omp";
    case Method::MtlSomp: return "mtl-somp";
    case Method::StlLasso: return "stl-lasso";
    case Method::MtlGroup: return "mtl-group";
  }
  return "?";
}

std::string method_label(Method m, bool ridge) {
  std::string base;
  switch (m) {
    case Method::StlOmp: base = "STL"; break;
    case Method::MtlSomp: base = "MTL"; break;
    case Method::StlLasso: base = "STL-LASSO"; break;
    case Method::MtlGroup: base = "MTL-GROUP"; break;
  }
  return ridge ? base + "+R" : base;
}

RowNorm parse_row_norm(const std::string& q) {
  if (q == "inf" || q == "Inf" || q == "infinity") return RowNorm::LInf;
  if (q == "2") return RowNorm::L2;
  throw InputError("--q must be 2 or inf, got '" + q + "'");
}

std::string row_norm_name(RowNorm q) { return q == RowNorm::LInf ? "inf" : "2"; }

DataMatrix load_data(const fs::path& path) {
  if (path.extension() == ".csv") return DataMatrix(load_matrix_csv(path));
  return DataMatrix(load_matrix(path));
}

// ---------------------------------------------------------------- synth

std::string cmd_synth(const SynthOptions& opts) {
  ensure_dir(opts.out_dir);
  const SynthSpec& s = opts.spec;
  std::ostringstream m;
  m << "# ssa synthetic dataset\n";
  m << "seed=" << s.seed << "\n";
  m << "features=" << s.features << "\n";
  m << "tasks=" << s.tasks << "\n";
  m << "support=" << s.support << "\n";
  m << "share_fraction=" << fmt17(s.share_fraction) << "\n";
  m << "snr=" << (std::isinf(s.snr) ? std::string("inf") : fmt17(s.snr)) << "\n";

  if (opts.kind == SynthKind::Regression) {
    const SynthRegression data = synth_regression(s);
    save_matrix(opts.out_dir / "x.bin", data.x.values());
    save_matrix(opts.out_dir / "y.bin", RowMatrix(data.y));
    save_matrix(opts.out_dir / "planted_c.bin", RowMatrix(data.planted.weights));
    m << "kind=regression\n";
    m << "samples=" << s.samples << "\n";
    m << "planted_rows=" << join(data.support.all.sorted()) << "\n";
    m << "files=x.bin y.bin planted_c.bin\n";
  } else {
    const VerificationSplit split = synth_classification(s, opts.per_class, opts.background, opts.test_per_class);
    save_matrix(opts.out_dir / "train_x.bin", split.train_x.values());
    save_labels(opts.out_dir / "train_labels.csv", split.train_labels);
    save_matrix(opts.out_dir / "test_x.bin", split.test_x.values());
    std::vector<Label> test_labels(split.test_labels.begin(), split.test_labels.end());
    save_labels(opts.out_dir / "test_labels.csv", test_labels);
    m << "kind=classification\n";
    m << "per_class=" << opts.per_class << "\n";
    m << "background=" << opts.background << "\n";
    m << "test_per_class=" << opts.test_per_class << "\n";
    m << "train_samples=" << split.train_x.rows() << "\n";
    m << "test_samples=" << split.test_x.rows() << "\n";
    m << "planted_rows=" << join(split.support.all.sorted()) << "\n";
    m << "files=train_x.bin train_labels.csv test_x.bin test_labels.csv\n";
  }
  const std::string manifest = m.str();
  write_text(opts.out_dir / "manifest.txt", manifest);
  return manifest;
}

// ---------------------------------------------------------------- extract

std::vector<ManifestEntry> read_manifest(const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw InputError("cannot open manifest " + manifest.string());
  const fs::path base = manifest.parent_path();
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line, ',');
    if (entries.empty() && !fields.empty() && fields[0] == "image_path") continue;
    const std::string where = manifest.string() + ":" + std::to_string(number);
    if (fields.size() != 6) {
      throw InputError(where + ": expected image_path,left_x,left_y,right_x,right_y,class_id");
    }
    ManifestEntry e;
    e.image = fs::path(fields[0]).is_absolute() ? fs::path(fields[0]) : base / fields[0];
    e.eye_left = {to_double(fields[1], where), to_double(fields[2], where)};
    e.eye_right = {to_double(fields[3], where), to_double(fields[4], where)};
    if (fields[5] != "-") {
      const long long id = to_int(fields[5], where);
      if (id < 0) throw InputError(where + ": negative class id");
      e.label = static_cast<int>(id);
    }
    entries.push_back(std::move(e));
  }
  if (entries.empty()) throw InputError("manifest " + manifest.string() + " lists no images");
  return entries;
}

Index cmd_extract(const ExtractOptions& opts) {
  const auto entries = read_manifest(opts.manifest);
  const FilterBank bank = build_filter_bank(opts.scales, opts.orientations, opts.gabor);
  const PgmLoader loader;
  const Index d = static_cast<Index>(opts.crop) * opts.crop * static_cast<Index>(bank.kernels.size());

  RowMatrix features(static_cast<Index>(entries.size()), d);
  std::vector<Label> labels;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const GrayImage image = loader.load(e.image);
    const AlignedFace face = align_and_crop(image, e.eye_left, e.eye_right, opts.crop);
    features.row(static_cast<Index>(i)) = extract(face, bank).transpose();
    labels.push_back(e.label);
  }
  ensure_dir(opts.out_dir);
  save_matrix(opts.out_dir / "features.bin", features);
  save_labels(opts.out_dir / "labels.csv", labels);
  return features.rows();
}

// ---------------------------------------------------------------- select-train

Model train_model(const DataMatrix& x, const std::vector<Label>& labels, const TrainOptions& opts) {
  if (static_cast<Index>(labels.size()) != x.rows()) {
    throw InputError("training labels (" + std::to_string(labels.size()) + ") and feature rows (" +
                     std::to_string(x.rows()) + ") differ");
  }
  const int classes = num_classes(labels);
  const IndicatorResponse y = build_indicator(labels, classes);
  const Index d = x.cols();
  const Index tasks = y.tasks();

  Model model;
  model.method = opts.method;
  model.ridge = opts.ridge;
  model.alpha = opts.alpha;
  model.budget = opts.budget;
  model.lambda = opts.lambda;
  model.q = opts.q;
  model.rel_tol = opts.rel_tol;
  model.max_iters = opts.max_iters;
  model.seed = opts.seed;

  GreedyConfig greedy;
  greedy.max_features = opts.budget;
  ConvexConfig convex;
  convex.lambda = opts.lambda;
  convex.max_iters = opts.max_iters;
  convex.rel_tol = opts.rel_tol;
  convex.q = opts.q;

  Matrix weights = Matrix::Zero(d, tasks);
  Vector biases = Vector::Zero(tasks);

  switch (opts.method) {
    case Method::StlOmp: {
      const auto fits = omp_per_task(x, y, greedy);
      for (Index l = 0; l < tasks; ++l) {
        const auto& fit = fits[static_cast<std::size_t>(l)];
        model.supports.push_back(fit.support);
        weights.col(l) = fit.coefficients.weights.col(0);
        biases(l) = fit.coefficients.biases(0);
        for (const auto& w : fit.warnings) model.warnings.push_back("task " + std::to_string(l) + ": " + w);
      }
      break;
    }
    case Method::MtlSomp: {
      const GreedyFit fit = somp(x, y, greedy);
      model.supports.push_back(fit.support);
      weights = fit.coefficients.weights;
      biases = fit.coefficients.biases;
      model.warnings.insert(model.warnings.end(), fit.warnings.begin(), fit.warnings.end());
      break;
    }
    case Method::StlLasso:
    case Method::MtlGroup: {
      const ConvexFit fit =
          opts.method == Method::StlLasso ? solve_all_single_task(x, y, convex) : group_solver(x, y, convex);
      model.converged = fit.converged;
      if (!fit.converged) {
        model.warnings.push_back("solver did not converge within " + std::to_string(fit.iterations_used) +
                                 " iterations");
      }
      weights = fit.coefficients.weights;
      if (opts.method == Method::StlLasso) {
        for (Index l = 0; l < tasks; ++l) {
          SupportSet s = extract_support(weights.col(l), opts.budget, RowNorm::LInf);
          restrict_rows(weights, s, l);
          if (static_cast<Index>(s.size()) < opts.budget) {
            model.warnings.push_back("task " + std::to_string(l) + ": selected " + std::to_string(s.size()) +
                                     " of " + std::to_string(opts.budget) + " features");
          }
          model.supports.push_back(std::move(s));
        }
      } else {
        SupportSet s = extract_support(weights, opts.budget, opts.q);
        restrict_rows(weights, s, -1);
        if (static_cast<Index>(s.size()) < opts.budget) {
          model.warnings.push_back("selected " + std::to_string(s.size()) + " of " + std::to_string(opts.budget) +
                                   " features");
        }
        model.supports.push_back(std::move(s));
      }
      // Biases consistent with the truncated weights.
      const CenteredData centered = center(x, y.matrix());
      biases = recover_biases(centered, weights);
      break;
    }
  }

  if (opts.ridge) {
    if (model.shared_support()) {
      const SupportSet& s = model.supports.front();
      if (s.empty()) {
        model.warnings.push_back("ridge refit skipped: empty support");
      } else {
        const CoefficientMatrix refit = ridge_refit(x, y, s, opts.alpha);
        weights = refit.weights;
        biases = refit.biases;
      }
    } else {
      for (Index l = 0; l < tasks; ++l) {
        const SupportSet& s = model.supports[static_cast<std::size_t>(l)];
        if (s.empty()) {
          model.warnings.push_back("task " + std::to_string(l) + ": ridge refit skipped, empty support");
          continue;
        }
        const CoefficientMatrix refit = ridge_refit(x, Matrix(y.column(l)), s, opts.alpha);
        weights.col(l) = refit.weights.col(0);
        biases(l) = refit.biases(0);
      }
    }
  }

  model.coefficients = CoefficientMatrix(std::move(weights), std::move(biases));
  return model;
}

void write_model(const fs::path& path, const Model& model) {
  std::ostringstream out;
  out << "# ssa model\n";
  out << "format=ssa-model-1\n";
  out << "method=" << method_name(model.method) << "\n";
  out << "refit=" << (model.ridge ? "ridge" : "none") << "\n";
  out << "alpha=" << fmt17(model.alpha) << "\n";
  out << "budget=" << model.budget << "\n";
  out << "lambda=" << fmt17(model.lambda) << "\n";
  out << "q=" << row_norm_name(model.q) << "\n";
  out << "rel_tol=" << fmt17(model.rel_tol) << "\n";
  out << "max_iters=" << model.max_iters << "\n";
  out << "seed=" << model.seed << "\n";
  out << "features=" << model.coefficients.features() << "\n";
  out << "tasks=" << model.coefficients.tasks() << "\n";
  out << "converged=" << (model.converged ? "true" : "false") << "\n";
  for (const auto& w : model.warnings) out << "warning=" << w << "\n";
  if (model.shared_support()) {
    out << "support=" << join(model.supports.front().indices()) << "\n";
  } else {
    for (std::size_t l = 0; l < model.supports.size(); ++l) {
      out << "support." << l << "=" << join(model.supports[l].indices()) << "\n";
    }
  }
  out << "biases=";
  for (Index l = 0; l < model.coefficients.tasks(); ++l) out << (l ? " " : "") << fmt17(model.coefficients.biases(l));
  out << "\n";
  out << "triples\n";
  out << "row,task,value\n";
  const Matrix& w = model.coefficients.weights;
  for (Index i = 0; i < w.rows(); ++i) {
    for (Index l = 0; l < w.cols(); ++l) {
      if (w(i, l) != 0.0) out << i << "," << l << "," << fmt17(w(i, l)) << "\n";
    }
  }
  write_text(path, out.str());
}

Model read_model(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model " + path.string());
  std::map<std::string, std::string> kv;
  std::vector<std::string> warnings;
  std::map<Index, std::string> task_supports;
  std::string line;
  std::size_t number = 0;
  bool in_triples = false;
  std::vector<std::tuple<Index, Index, double>> triples;

  while (std::getline(in, line)) {
    ++number;
    line = trim(line);
    const std::string where = path.string() + ":" + std::to_string(number);
    if (line.empty() || line.front() == '#') continue;
    if (!in_triples) {
      if (line == "triples") {
        in_triples = true;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw InputError(where + ": expected key=value");
      const std::string key = line.substr(0, eq);
      const std::string value = line.substr(eq + 1);
      if (key == "warning") warnings.push_back(value);
      else if (key.rfind("support.", 0) == 0) task_supports[static_cast<Index>(to_int(key.substr(8), where))] = value;
      else kv[key] = value;
      continue;
    }
    if (line == "row,task,value") continue;
    const auto f = split(line, ',');
    if (f.size() != 3) throw InputError(where + ": expected row,task,value");
    triples.emplace_back(static_cast<Index>(to_int(f[0], where)), static_cast<Index>(to_int(f[1], where)),
                         to_double(f[2], where));
  }

  auto get = [&](const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw InputError(path.string() + ": missing '" + key + "'");
    return it->second;
  };
  if (get("format") != "ssa-model-1") throw InputError(path.string() + ": unsupported model format");
  const std::string p = path.string();

  Model model;
  model.method = parse_method(get("method"));
  model.ridge = get("refit") == "ridge";
  model.alpha = to_double(get("alpha"), p);
  model.budget = static_cast<Index>(to_int(get("budget"), p));
  model.lambda = to_double(get("lambda"), p);
  model.q = parse_row_norm(get("q"));
  model.rel_tol = to_double(get("rel_tol"), p);
  model.max_iters = static_cast<Index>(to_int(get("max_iters"), p));
  model.seed = static_cast<std::uint64_t>(to_int(get("seed"), p));
  model.converged = get("converged") == "true";
  model.warnings = std::move(warnings);
  const Index d = static_cast<Index>(to_int(get("features"), p));
  const Index tasks = static_cast<Index>(to_int(get("tasks"), p));
  if (d < 1 || tasks < 1) throw InputError(p + ": bad model dimensions");

  auto parse_support = [&](const std::string& text) {
    SupportSet s;
    std::istringstream ss(text);
    std::string tok;
    while (ss >> tok) {
      const Index j = static_cast<Index>(to_int(tok, p));
      if (j < 0 || j >= d) throw InputError(p + ": support index out of range");
      s.add(j);
    }
    return s;
  };
  if (model.shared_support()) {
    model.supports.push_back(parse_support(get("support")));
  } else {
    for (Index l = 0; l < tasks; ++l) {
      const auto it = task_supports.find(l);
      if (it == task_supports.end()) throw InputError(p + ": missing support." + std::to_string(l));
      model.supports.push_back(parse_support(it->second));
    }
  }

  Vector biases(tasks);
  {
    std::istringstream ss(get("biases"));
    std::string tok;
    Index l = 0;
    while (ss >> tok) {
      if (l >= tasks) throw InputError(p + ": too many biases");
      biases(l++) = to_double(tok, p);
    }
    if (l != tasks) throw InputError(p + ": expected " + std::to_string(tasks) + " biases");
  }
  Matrix weights = Matrix::Zero(d, tasks);
  for (const auto& [row, task, value] : triples) {
    if (row < 0 || row >= d || task < 0 || task >= tasks) throw InputError(p + ": triple out of range");
    weights(row, task) = value;
  }
  model.coefficients = CoefficientMatrix(std::move(weights), std::move(biases));
  return model;
}

Model cmd_select_train(const TrainOptions& opts) {
  const DataMatrix x = load_data(opts.train_x);
  const auto labels = load_labels(opts.train_labels);
  Model model = train_model(x, labels, opts);
  if (opts.model_out.has_parent_path()) ensure_dir(opts.model_out.parent_path());
  write_model(opts.model_out, model);
  return model;
}

// ---------------------------------------------------------------- evaluate

Matrix score_with_model(const Model& model, const DataMatrix& x) {
  const CoefficientMatrix& c = model.coefficients;
  if (x.cols() != c.features()) {
    throw InputError("test features have " + std::to_string(x.cols()) + " columns, model expects " +
                     std::to_string(c.features()));
  }
  std::set<Index> rows;
  for (const auto& s : model.supports) rows.insert(s.begin(), s.end());

  Matrix scores(x.rows(), c.tasks());
  scores.rowwise() = c.biases.transpose();
  for (Index j : rows) scores.noalias() += x.column(j) * c.weights.row(j);
  return scores;
}

ProtocolSummary cmd_evaluate(const EvaluateOptions& opts) {
  const Model model = read_model(opts.model);
  const DataMatrix x = load_data(opts.test_x);
  const auto labels = load_labels(opts.test_labels);
  if (static_cast<Index>(labels.size()) != x.rows()) throw InputError("test labels and test rows differ in count");

  std::vector<int> ids;
  ids.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels[i] || *labels[i] >= model.coefficients.tasks()) {
      throw InputError("test sample " + std::to_string(i) + " is not one of the model's known classes");
    }
    ids.push_back(*labels[i]);
  }

  const Matrix scores = score_with_model(model, x);
  const auto curves = per_person_curves(scores, ids);
  const ProtocolSummary summary = average_protocol(curves, opts.fpr_grid_step, 0.1);

  ensure_dir(opts.out_dir);
  write_summary_csv(opts.out_dir / "summary.csv", {{method_label(model.method, model.ridge), summary}});
  write_roc_csv(opts.out_dir / "roc.csv", summary);
  return summary;
}

}  // namespace ssa::cli
