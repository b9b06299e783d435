#include "ssa/synth.hpp"

#include <cmath>
#include <string>

#include "ssa/errors.hpp"
#include "ssa/random.hpp"

namespace ssa {

using detail::require;

namespace {

struct Planted {
  Matrix weights;
  PlantedSupport support;
};

Planted plant(const SynthSpec& spec, Xoshiro256ss& rng) {
  const auto rows = sample_without_replacement(rng, static_cast<std::size_t>(spec.features),
                                               static_cast<std::size_t>(spec.support));
  const auto shared = static_cast<std::size_t>(std::llround(spec.share_fraction * static_cast<double>(spec.support)));

  Planted out;
  out.weights = Matrix::Zero(spec.features, spec.tasks);
  out.support.per_task.resize(static_cast<std::size_t>(spec.tasks));
  for (std::size_t m = 0; m < rows.size(); ++m) {
    const auto row = static_cast<Index>(rows[m]);
    out.support.all.add(row);
    if (m < shared) {
      out.support.shared.add(row);
      for (Index l = 0; l < spec.tasks; ++l) {
        out.weights(row, l) = rng.sign() * rng.uniform(1.0, 2.0);
        out.support.per_task[static_cast<std::size_t>(l)].add(row);
      }
    } else {
      const auto owner = static_cast<Index>((m - shared) % static_cast<std::size_t>(spec.tasks));
      out.weights(row, owner) = rng.sign() * rng.uniform(1.0, 2.0);
      out.support.per_task[static_cast<std::size_t>(owner)].add(row);
    }
  }
  return out;
}

}  // namespace

void SynthSpec::validate() const {
  require(samples >= 1 && features >= 1 && tasks >= 1, "synthetic spec needs N, d, L >= 1");
  require(support >= 1, "planted support size k must be >= 1");
  require(support <= features, "infeasible spec: k=" + std::to_string(support) + " exceeds d=" +
                                   std::to_string(features));
  require(share_fraction >= 0.0 && share_fraction <= 1.0, "share_fraction must lie in [0, 1]");
  require(snr > 0.0 && !std::isnan(snr), "snr must be positive (inf for noiseless)");
}

SynthRegression synth_regression(const SynthSpec& spec) {
  spec.validate();
  Xoshiro256ss rng(spec.seed);

  RowMatrix x(spec.samples, spec.features);
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) x(i, j) = rng.normal();
  }
  Planted planted = plant(spec, rng);

  Matrix y = x * planted.weights;
  for (Index l = 0; l < spec.tasks; ++l) {
    const double mean = y.col(l).mean();
    const double signal_var = (y.col(l).array() - mean).square().mean();
    const double noise_sd = std::isinf(spec.snr) ? 0.0 : std::sqrt(signal_var / spec.snr);
    if (noise_sd == 0.0) continue;
    for (Index i = 0; i < spec.samples; ++i) y(i, l) += noise_sd * rng.normal();
  }

  return SynthRegression{DataMatrix(std::move(x)), std::move(y),
                         CoefficientMatrix(std::move(planted.weights), Vector::Zero(spec.tasks)),
                         std::move(planted.support)};
}

VerificationSplit synth_classification(const SynthSpec& spec, Index per_class, Index background,
                                       Index test_per_class) {
  spec.validate();
  require(per_class >= 1, "per_class must be >= 1");
  require(background >= 0, "background count must be >= 0");
  require(test_per_class >= 1, "test_per_class must be >= 1");
  Xoshiro256ss rng(spec.seed);

  Planted planted = plant(spec, rng);
  const Matrix& means = planted.weights;
  double mean_sq = 0.0;
  Index nonzero = 0;
  for (Index i = 0; i < means.size(); ++i) {
    if (means.data()[i] != 0.0) {
      mean_sq += means.data()[i] * means.data()[i];
      ++nonzero;
    }
  }
  mean_sq /= static_cast<double>(nonzero);
  const double sigma = std::isinf(spec.snr) ? 0.0 : std::sqrt(mean_sq / spec.snr);

  const Index d = spec.features;
  auto draw = [&](const Eigen::Ref<const Vector>& mean, RowMatrix& out, Index row) {
    for (Index j = 0; j < d; ++j) out(row, j) = mean(j) + sigma * rng.normal();
  };

  const Index n_train = per_class * spec.tasks + background;
  RowMatrix train(n_train, d);
  std::vector<Label> train_labels;
  train_labels.reserve(static_cast<std::size_t>(n_train));
  Index row = 0;
  for (Index l = 0; l < spec.tasks; ++l) {
    for (Index s = 0; s < per_class; ++s) {
      draw(means.col(l), train, row++);
      train_labels.emplace_back(static_cast<int>(l));
    }
  }
  for (Index s = 0; s < background; ++s) {
    Vector mean = Vector::Zero(d);
    for (Index j : planted.support.shared) mean(j) = rng.sign() * rng.uniform(1.0, 2.0);
    draw(mean, train, row++);
    train_labels.emplace_back(std::nullopt);
  }

  RowMatrix test(test_per_class * spec.tasks, d);
  std::vector<int> test_labels;
  row = 0;
  for (Index l = 0; l < spec.tasks; ++l) {
    for (Index s = 0; s < test_per_class; ++s) {
      draw(means.col(l), test, row++);
      test_labels.push_back(static_cast<int>(l));
    }
  }

  IndicatorResponse indicator = build_indicator(train_labels, static_cast<int>(spec.tasks));
  return VerificationSplit{DataMatrix(std::move(train)),
                           std::move(indicator),
                           std::move(train_labels),
                           DataMatrix(std::move(test)),
                           std::move(test_labels),
                           per_class,
                           background,
                           CoefficientMatrix(planted.weights, Vector::Zero(spec.tasks)),
                           std::move(planted.support)};
}

}  // namespace ssa
