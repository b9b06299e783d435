#pragma once

// Gabor filter-bank face features.
//
// Image coordinates are continuous with pixel (row r, column c) centered at
// (x, y) = (c + 0.5, r + 0.5); eye positions use the same frame.

#include <complex>
#include <vector>

#include "ssa/model.hpp"

namespace ssa {

using GrayImage = RowMatrix;
using ComplexKernel = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// psi(z) = (k^2 / sigma^2) exp(-k^2 |z|^2 / (2 sigma^2)) (exp(i k.z) - exp(-sigma^2 / 2)),
/// k = k_max / spacing^scale, orientation angle = o * pi / orientations.
struct GaborParams {
  double k_max = 1.5707963267948966;    // pi / 2
  double spacing = 1.4142135623730951;  // sqrt(2)
  double sigma = 6.283185307179586;     // 2 pi
  int kernel_size = 33;                 // odd window width
};

struct FilterBank {
  std::vector<ComplexKernel> kernels;  // scale-major, then orientation
  int scales = 0;
  int orientations = 0;
  int kernel_size = 0;

  const ComplexKernel& kernel(int scale, int orientation) const {
    return kernels[static_cast<std::size_t>(scale * orientations + orientation)];
  }
};

FilterBank build_filter_bank(int scales, int orientations, const GaborParams& params = {});

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct AlignmentTargets {
  /// Eye targets as fractions of the crop size.
  double left_x = 0.3;
  double right_x = 0.7;
  double eye_y = 0.35;
};

/// Grayscale crop x crop face with intensities in [0, 1].
class AlignedFace {
 public:
  explicit AlignedFace(GrayImage pixels);
  const GrayImage& pixels() const noexcept { return pixels_; }
  Index size() const noexcept { return pixels_.rows(); }

 private:
  GrayImage pixels_;
};

/// Similarity transform putting the eyes on the targets, bilinear resampling
/// (edge-clamped), crop, then min-max rescale to [0, 1].
AlignedFace align_and_crop(const GrayImage& image, Point eye_left, Point eye_right, int crop = 64,
                           const AlignmentTargets& targets = {});

/// Same-size convolution with symmetric (edge-repeating) borders.
ComplexKernel convolve_same(const GrayImage& image, const ComplexKernel& kernel);

/// Per-pixel response magnitudes for every kernel, concatenated
/// scale-major, then orientation, then row-major pixel.
Vector extract(const AlignedFace& face, const FilterBank& bank);

/// Feature length for a face of side `size`.
inline Index feature_length(Index size, const FilterBank& bank) {
  return size * size * static_cast<Index>(bank.kernels.size());
}

}  // namespace ssa
