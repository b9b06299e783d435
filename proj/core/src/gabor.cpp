#include "ssa/gabor.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ssa/errors.hpp"

namespace ssa {

using detail::require;

namespace {

// Symmetric reflection about the image edges (the edge pixel is repeated);
// valid for any offset, including kernels wider than the image.
Index reflect(Index i, Index n) {
  const Index period = 2 * n;
  Index m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

ComplexKernel gabor_kernel(double k, double angle, const GaborParams& p) {
  const int size = p.kernel_size;
  const int half = size / 2;
  const double k2 = k * k;
  const double s2 = p.sigma * p.sigma;
  const double dc = std::exp(-0.5 * s2);
  const double kx = k * std::cos(angle);
  const double ky = k * std::sin(angle);

  ComplexKernel kernel(size, size);
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      const double x = c - half;
      const double y = r - half;
      const double envelope = (k2 / s2) * std::exp(-k2 * (x * x + y * y) / (2.0 * s2));
      const double phase = kx * x + ky * y;
      kernel(r, c) = envelope * std::complex<double>(std::cos(phase) - dc, std::sin(phase));
    }
  }
  // The analytic DC term only cancels on an infinite window; remove what the
  // truncated window leaves behind.
  const std::complex<double> mean = kernel.mean();
  kernel.array() -= mean;
  return kernel;
}

}  // namespace

FilterBank build_filter_bank(int scales, int orientations, const GaborParams& params) {
  require(scales >= 1, "filter bank needs at least one scale");
  require(orientations >= 1, "filter bank needs at least one orientation");
  require(params.sigma > 0.0 && std::isfinite(params.sigma), "Gabor sigma must be positive");
  require(params.k_max > 0.0 && std::isfinite(params.k_max), "Gabor k_max must be positive");
  require(params.spacing > 0.0 && std::isfinite(params.spacing), "Gabor spacing must be positive");
  require(params.kernel_size >= 1 && params.kernel_size % 2 == 1, "Gabor kernel size must be a positive odd number");

  FilterBank bank;
  bank.scales = scales;
  bank.orientations = orientations;
  bank.kernel_size = params.kernel_size;
  bank.kernels.reserve(static_cast<std::size_t>(scales * orientations));
  for (int s = 0; s < scales; ++s) {
    const double k = params.k_max / std::pow(params.spacing, s);
    for (int o = 0; o < orientations; ++o) {
      bank.kernels.push_back(gabor_kernel(k, std::numbers::pi * o / orientations, params));
    }
  }
  return bank;
}

AlignedFace::AlignedFace(GrayImage pixels) : pixels_(std::move(pixels)) {
  require(pixels_.rows() >= 1 && pixels_.rows() == pixels_.cols(), "aligned face must be square and non-empty");
  require(pixels_.allFinite() && pixels_.minCoeff() >= 0.0 && pixels_.maxCoeff() <= 1.0,
          "aligned face intensities must lie in [0, 1]");
}

AlignedFace align_and_crop(const GrayImage& image, Point eye_left, Point eye_right, int crop,
                           const AlignmentTargets& targets) {
  require(crop >= 1, "crop size must be positive");
  require(image.rows() >= 1 && image.cols() >= 1, "image is empty");
  const double width = static_cast<double>(image.cols());
  const double height = static_cast<double>(image.rows());
  auto inside = [&](Point p) { return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height; };
  require(inside(eye_left) && inside(eye_right), "eye coordinates lie outside the image");
  require(eye_left.x != eye_right.x || eye_left.y != eye_right.y, "eye coordinates coincide");

  const double size = static_cast<double>(crop);
  const Point target_left{targets.left_x * size, targets.eye_y * size};
  const Point target_right{targets.right_x * size, targets.eye_y * size};

  // Source = eye_left + (1/s) R(-theta) (output - target_left).
  const double ex = eye_right.x - eye_left.x;
  const double ey = eye_right.y - eye_left.y;
  const double tx = target_right.x - target_left.x;
  const double ty = target_right.y - target_left.y;
  const double inv_scale = std::hypot(ex, ey) / std::hypot(tx, ty);
  const double theta = std::atan2(ty, tx) - std::atan2(ey, ex);
  const double cos_t = std::cos(theta) * inv_scale;
  const double sin_t = std::sin(theta) * inv_scale;

  const Index rows = image.rows();
  const Index cols = image.cols();
  auto pixel = [&](Index r, Index c) {
    return image(std::clamp<Index>(r, 0, rows - 1), std::clamp<Index>(c, 0, cols - 1));
  };

  GrayImage out(crop, crop);
  for (int r = 0; r < crop; ++r) {
    for (int c = 0; c < crop; ++c) {
      const double ox = c + 0.5 - target_left.x;
      const double oy = r + 0.5 - target_left.y;
      const double sx = eye_left.x + cos_t * ox + sin_t * oy;
      const double sy = eye_left.y - sin_t * ox + cos_t * oy;
      // Back to pixel-index space where pixel centers are integers.
      const double u = sx - 0.5;
      const double v = sy - 0.5;
      const double u0 = std::floor(u);
      const double v0 = std::floor(v);
      const double fu = u - u0;
      const double fv = v - v0;
      const auto iu = static_cast<Index>(u0);
      const auto iv = static_cast<Index>(v0);
      out(r, c) = (1.0 - fv) * ((1.0 - fu) * pixel(iv, iu) + fu * pixel(iv, iu + 1)) +
                  fv * ((1.0 - fu) * pixel(iv + 1, iu) + fu * pixel(iv + 1, iu + 1));
    }
  }

  const double lo = out.minCoeff();
  const double hi = out.maxCoeff();
  if (hi > lo) {
    out = (out.array() - lo) / (hi - lo);
  } else {
    out.setZero();
  }
  return AlignedFace(std::move(out));
}

ComplexKernel convolve_same(const GrayImage& image, const ComplexKernel& kernel) {
  require(kernel.rows() == kernel.cols() && kernel.rows() % 2 == 1, "kernel must be square with odd size");
  const Index h = kernel.rows() / 2;
  const Index rows = image.rows();
  const Index cols = image.cols();

  // Padded by 2h so that out(r, c) += K(i, j) * padded(r - i + 2h, c - j + 2h).
  RowMatrix padded(rows + 2 * h, cols + 2 * h);
  for (Index a = 0; a < padded.rows(); ++a) {
    for (Index b = 0; b < padded.cols(); ++b) padded(a, b) = image(reflect(a - h, rows), reflect(b - h, cols));
  }

  RowMatrix real = RowMatrix::Zero(rows, cols);
  RowMatrix imag = RowMatrix::Zero(rows, cols);
  for (Index i = 0; i < kernel.rows(); ++i) {
    for (Index j = 0; j < kernel.cols(); ++j) {
      const auto block = padded.block(2 * h - i, 2 * h - j, rows, cols);
      real.noalias() += kernel(i, j).real() * block;
      imag.noalias() += kernel(i, j).imag() * block;
    }
  }
  ComplexKernel out(rows, cols);
  out.real() = real;
  out.imag() = imag;
  return out;
}

Vector extract(const AlignedFace& face, const FilterBank& bank) {
  require(!bank.kernels.empty(), "filter bank is empty");
  const Index pixels = face.size() * face.size();
  Vector features(pixels * static_cast<Index>(bank.kernels.size()));
  Index offset = 0;
  for (const auto& kernel : bank.kernels) {
    const ComplexKernel response = convolve_same(face.pixels(), kernel);
    features.segment(offset, pixels) = response.cwiseAbs().reshaped<Eigen::RowMajor>();
    offset += pixels;
  }
  return features;
}

}  // namespace ssa
