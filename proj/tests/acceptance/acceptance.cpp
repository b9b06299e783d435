// Acceptance suite: one [PASS]/[FAIL] line per criterion. Exit status is
// nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "oracles.hpp"
#include "ssa/centering.hpp"
#include "ssa/convex.hpp"
#include "ssa/evaluation.hpp"
#include "ssa/gabor.hpp"
#include "ssa/greedy.hpp"
#include "ssa/synth.hpp"

using namespace ssa;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!out.pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", id, title.c_str(), out.detail.c_str(), secs);
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string str(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

bool non_increasing(const std::vector<double>& trace) {
  for (std::size_t t = 1; t < trace.size(); ++t)
    if (trace[t] > trace[t - 1] + 1e-12 * std::max(1.0, std::abs(trace[t - 1]))) return false;
  return true;
}

IndicatorResponse random_indicator(Xoshiro256ss& rng, Index n, int tasks) {
  std::vector<Label> labels(static_cast<std::size_t>(n), std::nullopt);
  for (int l = 0; l < tasks; ++l) labels[static_cast<std::size_t>(l)] = l;
  for (Index i = tasks; i < n; ++i) {
    const auto draw = rng.below(static_cast<std::uint64_t>(tasks) + 1);
    if (draw < static_cast<std::uint64_t>(tasks)) labels[static_cast<std::size_t>(i)] = static_cast<int>(draw);
  }
  return build_indicator(labels, tasks);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double test_auc(const cli::Model& m, const VerificationSplit& s) {
  return average_protocol(per_person_curves(cli::score_with_model(m, s.test_x), s.test_labels)).auc_mean;
}

// Paired comparison benchmark shared by criteria 3 and 4.
struct Comparison {
  int mtl_beats_stl = 0;
  int ridge_holds = 0;
  double mtl = 0.0, stl = 0.0, mtl_ridge = 0.0;
};

Comparison run_comparison() {
  Comparison c;
  for (int t = 0; t < 50; ++t) {
    SynthSpec spec;
    spec.features = 500;
    spec.tasks = 10;
    spec.support = 8;
    spec.share_fraction = 1.0;
    spec.snr = 1.0;
    spec.seed = 5000 + static_cast<std::uint64_t>(t);
    const auto split = synth_classification(spec, 5, 100, 10);
    cli::TrainOptions opts;
    opts.budget = 8;
    opts.method = cli::Method::MtlSomp;
    const double mtl = test_auc(cli::train_model(split.train_x, split.train_labels, opts), split);
    opts.ridge = true;
    const double mtl_r = test_auc(cli::train_model(split.train_x, split.train_labels, opts), split);
    opts.ridge = false;
    opts.method = cli::Method::StlOmp;
    const double stl = test_auc(cli::train_model(split.train_x, split.train_labels, opts), split);
    c.mtl_beats_stl += mtl >= stl;
    c.ridge_holds += mtl_r >= mtl - 0.01;
    c.mtl += mtl / 50;
    c.stl += stl / 50;
    c.mtl_ridge += mtl_r / 50;
  }
  return c;
}

}  // namespace

int main() {
  criterion(1, "desk-scale scope and fixed quantities", [] {
    const auto bank = build_filter_bank(5, 8);
    const cli::SynthOptions synth;
    const cli::TrainOptions train;
    const Index train_n = 158 * synth.per_class + synth.background;
    const bool ok = bank.kernels.size() == 40 && feature_length(64, bank) == 163840 && train_n == 1000 &&
                    train.budget == 300;
    return Outcome{ok, "LFW Table 1 figures are not targets; kernels=" + std::to_string(bank.kernels.size()) +
                           " d=" + std::to_string(feature_length(64, bank)) + " train N=" + std::to_string(train_n) +
                           " K=" + std::to_string(train.budget)};
  });

  criterion(2, "SOMP shared-support recovery", [] {
    const auto start = std::chrono::steady_clock::now();
    int exact = 0;
    for (int t = 0; t < 50; ++t) {
      SynthSpec spec;
      spec.samples = 200;
      spec.features = 500;
      spec.tasks = 10;
      spec.support = 8;
      spec.share_fraction = 1.0;
      spec.snr = 100.0;
      spec.seed = 1000 + static_cast<std::uint64_t>(t);
      const auto data = synth_regression(spec);
      GreedyConfig cfg;
      cfg.max_features = 8;
      const auto fit = somp(data.x, data.y, Vector::Ones(10), cfg);
      exact += fit.support.sorted() == data.support.all.sorted();
    }
    const double secs = seconds_since(start);
    return Outcome{exact >= 48 && secs < 30.0,
                   std::to_string(exact) + "/50 exact (need >= 48), " + str(secs) + " s (need < 30)"};
  });

  Comparison cmp;
  bool cmp_done = false;
  auto comparison = [&]() -> const Comparison& {
    if (!cmp_done) cmp = run_comparison();
    cmp_done = true;
    return cmp;
  };

  criterion(3, "multi-task beats single-task", [&] {
    const auto& c = comparison();
    return Outcome{c.mtl_beats_stl >= 45, "MTL >= STL in " + std::to_string(c.mtl_beats_stl) +
                                              "/50 (need >= 45); mean AUC MTL " + str(c.mtl) + " STL " + str(c.stl)};
  });

  criterion(4, "ridge refit helps or ties", [&] {
    const auto& c = comparison();
    return Outcome{c.ridge_holds >= 45, "MTL+R >= MTL - 0.01 in " + std::to_string(c.ridge_holds) +
                                            "/50 (need >= 45); mean AUC MTL+R " + str(c.mtl_ridge)};
  });

  criterion(5, "LASSO stationarity certificate", [] {
    const auto start = std::chrono::steady_clock::now();
    Xoshiro256ss rng(505);
    int passed = 0;
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      const Index n = 5 + static_cast<Index>(rng.below(46));
      const Index d = 1 + static_cast<Index>(rng.below(100));
      const RowMatrix xm = oracle::gaussian(rng, n, d);
      const Vector y = oracle::gaussian_vector(rng, n);
      ConvexConfig cfg;
      cfg.lambda = rng.uniform(0.01, 1.0) * lasso_lambda_max(DataMatrix(xm), y);
      const auto fit = lasso(DataMatrix(xm), y, cfg);
      const auto kkt = oracle::lasso_kkt(xm, y, fit.coefficients.weights.col(0), fit.coefficients.biases(0), cfg.lambda);
      const double rel = std::max(kkt.active, kkt.inactive) / cfg.lambda;
      worst = std::max(worst, rel);
      passed += kkt.active <= 1e-6 * cfg.lambda && kkt.inactive <= 1e-6 * cfg.lambda;
    }
    const double secs = seconds_since(start);
    return Outcome{passed == 200 && secs < 10.0, std::to_string(passed) + "/200 certified, worst violation " +
                                                     str(worst) + " lambda, " + str(secs) + " s (need < 10)"};
  });

  criterion(6, "prox and projection oracles", [] {
    Xoshiro256ss rng(606);
    double worst_prox = 0.0;
    for (int t = 0; t < 100; ++t) {
      const Vector v = oracle::gaussian_vector(rng, 5);
      const double step = rng.uniform(0.0, 1.2) * v.cwiseAbs().sum();
      worst_prox = std::max(worst_prox, (prox_row_linf(v, step) - oracle::prox_linf_search(v, step)).cwiseAbs().maxCoeff());
    }
    int moreau_exact = 0;
    double worst_excess = -kInfinity;
    for (int t = 0; t < 1000; ++t) {
      const Vector v = oracle::gaussian_vector(rng, 1 + static_cast<Index>(rng.below(10))) *
                       std::exp(rng.uniform(-5.0, 5.0));
      const double r = rng.uniform(0.0, 1.5) * v.cwiseAbs().sum();
      const Vector p = project_l1_ball(v, r);
      moreau_exact += (prox_row_linf(v, r) + p) == v;
      worst_excess = std::max(worst_excess, p.cwiseAbs().sum() - r);
    }
    return Outcome{worst_prox <= 1e-6 && moreau_exact == 1000 && worst_excess <= 1e-12,
                   "prox error " + str(worst_prox) + " (need <= 1e-6), Moreau exact " + std::to_string(moreau_exact) +
                       "/1000, max ||P(v)||_1 - r = " + str(worst_excess)};
  });

  criterion(7, "group solver vs 10x longer reference", [] {
    Xoshiro256ss rng(707);
    double worst = 0.0;
    int monotone = 0;
    Index iterations = 0;
    for (int t = 0; t < 20; ++t) {
      const Index d = 2 + static_cast<Index>(rng.below(9));
      const int tasks = 1 + static_cast<int>(rng.below(4));
      const RowMatrix xm = oracle::gaussian(rng, 30, d);
      const auto y = random_indicator(rng, 30, tasks);
      ConvexConfig cfg;
      cfg.q = t % 2 ? RowNorm::L2 : RowNorm::LInf;
      cfg.lambda = rng.uniform(0.05, 0.6) * group_lambda_max(DataMatrix(xm), y, cfg.q);
      cfg.rel_tol = 1e-10;
      cfg.max_iters = 2000;
      const auto fit = group_solver(DataMatrix(xm), y, cfg);
      ConvexConfig ref = cfg;
      ref.step_rule = StepRule::Lipschitz;
      ref.rel_tol = 1e-15;
      ref.max_iters = 10 * std::max<Index>(fit.iterations_used, 1);
      const auto long_run = group_solver(DataMatrix(xm), y, ref);
      const Vector w = y.task_weights();
      const double a = group_objective(DataMatrix(xm), y.matrix(), w, fit.coefficients, cfg.lambda, cfg.q);
      const double b = group_objective(DataMatrix(xm), y.matrix(), w, long_run.coefficients, cfg.lambda, cfg.q);
      worst = std::max(worst, std::abs(a - b));
      iterations += fit.iterations_used;
      monotone += non_increasing(fit.objective_trace) && non_increasing(long_run.objective_trace);
    }
    return Outcome{worst <= 1e-6 && monotone == 20,
                   "worst objective gap " + str(worst) + " (need <= 1e-6), monotone " + std::to_string(monotone) + "/20, mean " +
                       std::to_string(iterations / 20) + " iterations"};
  });

  criterion(8, "greedy invariants", [] {
    Xoshiro256ss rng(808);
    double worst = 0.0;
    int monotone = 0, identical = 0;
    for (int t = 0; t < 100; ++t) {
      const Index n = 10 + static_cast<Index>(rng.below(40));
      const Index d = 5 + static_cast<Index>(rng.below(60));
      const Index tasks = 1 + static_cast<Index>(rng.below(5));
      const RowMatrix xm = oracle::gaussian(rng, n, d);
      const Matrix y = oracle::gaussian(rng, n, tasks);
      Vector w(tasks);
      for (Index l = 0; l < tasks; ++l) w(l) = rng.uniform(0.1, 1.0);
      GreedyConfig cfg;
      cfg.max_features = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(std::min(n, d) - 1)));
      const auto fit = somp(DataMatrix(xm), y, w, cfg, [&](const SupportSet& s, const Matrix& r) {
        for (Index j : s) {
          for (Index l = 0; l < r.cols(); ++l) {
            const double rn = r.col(l).norm();
            const double yn = (y.col(l).array() - y.col(l).mean()).matrix().norm();
            if (rn <= 1e-13 * yn) continue;  // exact fit: direction undefined
            double dot = 0.0;
            for (Index i = 0; i < n; ++i) dot += xm(i, j) * r(i, l);
            worst = std::max(worst, std::abs(dot) / (xm.col(j).norm() * rn));
          }
        }
      });
      bool mono = true;
      for (std::size_t k = 1; k < fit.residual_norms.size(); ++k)
        mono = mono && (fit.residual_norms[k].array() <= fit.residual_norms[k - 1].array() * (1 + 1e-12) + 1e-14).all();
      monotone += mono;

      const auto single = omp(DataMatrix(xm), y.col(0), cfg);
      const auto joint = somp(DataMatrix(xm), Matrix(y.col(0)), Vector::Constant(1, w(0)), cfg);
      const auto& a = single.coefficients;
      const auto& b = joint.coefficients;
      identical += single.support == joint.support &&
                   std::memcmp(a.weights.data(), b.weights.data(), sizeof(double) * a.weights.size()) == 0 &&
                   std::memcmp(a.biases.data(), b.biases.data(), sizeof(double) * a.biases.size()) == 0;
    }
    return Outcome{worst <= 1e-8 && monotone == 100 && identical == 100,
                   "worst orthogonality " + str(worst) + " (need <= 1e-8), non-increasing " + std::to_string(monotone) +
                       "/100, L=1 SOMP == OMP bitwise " + std::to_string(identical) + "/100"};
  });

  criterion(9, "ROC agrees with pairwise AUC", [] {
    Xoshiro256ss rng(909);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const std::size_t m = 2 + rng.below(200);
      const std::uint64_t levels = t % 2 ? 4 : (1ull << 40);  // odd trials are heavily tied
      std::vector<double> s(m);
      std::vector<char> p(m);
      for (std::size_t i = 0; i < m; ++i) {
        s[i] = static_cast<double>(rng.below(levels)) * 0.125;
        p[i] = static_cast<char>(rng.uniform() < 0.3);
      }
      p[0] = 1;
      p[1] = 0;
      worst = std::max(worst, std::abs(roc_curve(s, p).auc - auc_pairwise(s, p)));
    }
    return Outcome{worst <= 1e-12, "worst |difference| " + str(worst) + " over 1000 sets (need <= 1e-12)"};
  });

  criterion(10, "Gabor contract", [] {
    Xoshiro256ss rng(1010);
    const auto bank = build_filter_bank(5, 8);
    GrayImage img(64, 64);
    for (Index r = 0; r < 64; ++r)
      for (Index c = 0; c < 64; ++c) img(r, c) = rng.uniform();
    const Index length = extract(AlignedFace(img), bank).size();

    const Vector flat = extract(AlignedFace(GrayImage::Constant(64, 64, 0.4)), bank);
    double worst_flat = 0.0;
    for (std::size_t k = 0; k < bank.kernels.size(); ++k)
      worst_flat = std::max(worst_flat, flat.segment(static_cast<Index>(k) * 4096, 4096).maxCoeff() / bank.kernels[k].norm());

    const auto small = build_filter_bank(2, 2);
    GrayImage tiny(16, 16);
    for (Index r = 0; r < 16; ++r)
      for (Index c = 0; c < 16; ++c) tiny(r, c) = rng.uniform();
    const AlignedFace face(tiny);
    const Vector f = extract(face, small);
    double worst_naive = 0.0;
    for (int s = 0; s < 2; ++s) {
      for (int o = 0; o < 2; ++o) {
        RowMatrix re, im;
        oracle::naive_convolve(face.pixels(), small.kernel(s, o), re, im);
        for (Index r = 0; r < 16; ++r)
          for (Index c = 0; c < 16; ++c)
            worst_naive = std::max(worst_naive,
                                   std::abs(f((s * 2 + o) * 256 + r * 16 + c) - std::hypot(re(r, c), im(r, c))));
      }
    }
    return Outcome{length == 163840 && worst_flat <= 1e-6 && worst_naive <= 1e-8,
                   "length " + std::to_string(length) + ", constant-image response " + str(worst_flat) +
                       " of kernel norm, naive convolution gap " + str(worst_naive)};
  });

  criterion(11, "end-to-end determinism", [] {
    std::string report[2];
    const fs::path root = fs::temp_directory_path() / "ssa_acceptance_e2e";
    for (int run = 0; run < 2; ++run) {
      const fs::path dir = root / std::to_string(run);
      fs::remove_all(dir);
      cli::SynthOptions synth;
      synth.spec.features = 400;
      synth.spec.tasks = 12;
      synth.spec.support = 10;
      synth.spec.share_fraction = 0.75;
      synth.spec.snr = 2.0;
      synth.spec.seed = 2024;
      synth.background = 40;
      synth.out_dir = dir / "data";
      cli::cmd_synth(synth);
      for (auto method : {cli::Method::StlOmp, cli::Method::MtlSomp, cli::Method::StlLasso, cli::Method::MtlGroup}) {
        cli::TrainOptions train;
        train.method = method;
        train.ridge = true;
        train.budget = 10;
        train.lambda = 0.05;
        train.train_x = synth.out_dir / "train_x.bin";
        train.train_labels = synth.out_dir / "train_labels.csv";
        train.model_out = dir / (cli::method_name(method) + ".txt");
        cli::cmd_select_train(train);
        cli::EvaluateOptions eval;
        eval.model = train.model_out;
        eval.test_x = synth.out_dir / "test_x.bin";
        eval.test_labels = synth.out_dir / "test_labels.csv";
        eval.out_dir = dir / ("report-" + cli::method_name(method));
        cli::cmd_evaluate(eval);
        report[run] += slurp(eval.out_dir / "summary.csv") + slurp(eval.out_dir / "roc.csv");
      }
    }
    fs::remove_all(root);
    return Outcome{!report[0].empty() && report[0] == report[1],
                   std::to_string(report[0].size()) + " report bytes over 4 methods, identical=" +
                       (report[0] == report[1] ? "yes" : "no")};
  });

  std::printf("%s: %d criterion(s) failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
