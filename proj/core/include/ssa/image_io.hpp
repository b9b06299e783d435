#pragma once

#include <filesystem>
#include <memory>

#include "ssa/gabor.hpp"

namespace ssa {

/// Source of grayscale images; implementations map raw pixel values to doubles.
class ImageLoader {
 public:
  virtual ~ImageLoader() = default;
  virtual GrayImage load(const std::filesystem::path& path) const = 0;
};

/// Binary PGM (P5), maxval up to 255. Pixel values are returned unscaled.
class PgmLoader final : public ImageLoader {
 public:
  GrayImage load(const std::filesystem::path& path) const override;
};

GrayImage read_pgm(const std::filesystem::path& path);
/// Writes P5 with maxval 255; values are rounded and clamped to [0, 255].
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

}  // namespace ssa
