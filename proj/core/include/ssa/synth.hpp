#pragma once

// Synthetic benchmarks with a planted row support.
//
// A planted support has k rows. The first round(share_fraction * k) rows are
// active in every task; each remaining row is private to exactly one task
// (assigned round-robin), so the planted coefficient matrix always has
// exactly k nonzero rows.

#include <cstdint>
#include <vector>

#include "ssa/model.hpp"

namespace ssa {

struct SynthSpec {
  Index samples = 200;   // N (regression only; classification derives N from counts)
  Index features = 500;  // d
  Index tasks = 10;      // L
  Index support = 8;     // k
  double snr = 100.0;    // may be +inf for noiseless data
  double share_fraction = 1.0;
  std::uint64_t seed = 42;

  void validate() const;
};

struct PlantedSupport {
  SupportSet shared;
  std::vector<SupportSet> per_task;  // full support of each task (shared + private)
  SupportSet all;                    // every planted row, in draw order
};

struct SynthRegression {
  DataMatrix x;
  Matrix y;                   // N x L real responses
  CoefficientMatrix planted;  // d x L, biases zero
  PlantedSupport support;
};

/// X ~ N(0, 1) entries, Y = X C + noise with per-task noise variance
/// var(X c_l) / snr.
SynthRegression synth_regression(const SynthSpec& spec);

struct VerificationSplit {
  DataMatrix train_x;
  IndicatorResponse train_y;
  std::vector<Label> train_labels;  // empty for background samples
  DataMatrix test_x;
  std::vector<int> test_labels;     // known classes only
  Index per_class_train_count = 0;
  Index background_count = 0;
  CoefficientMatrix class_means;    // d x L planted class means
  PlantedSupport support;
};

/// Class-conditional Gaussians: class l has mean c_l (the planted column),
/// background samples draw a fresh mean on the shared rows only; every entry
/// carries N(0, sigma^2) noise with sigma^2 = mean(planted nonzero^2) / snr.
/// Train holds `per_class` positives per class plus `background` samples;
/// test holds `test_per_class` samples per class.
VerificationSplit synth_classification(const SynthSpec& spec, Index per_class, Index background,
                                       Index test_per_class = 10);

}  // namespace ssa
