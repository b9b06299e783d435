#pragma once

// Matrix and label persistence.
//
// Binary matrix layout (all little-endian):
//   bytes 0-3   magic "SSA1"
//   bytes 4-7   uint32 row count
//   bytes 8-11  uint32 column count
//   bytes 12-15 uint32 reserved, written as zero
//   then rows * cols IEEE-754 binary64 values, row-major.
//
// CSV matrices have no header and use 17 significant digits. Label files have
// two columns, sample_index,class_id, with "-" for background samples.

#include <filesystem>
#include <vector>

#include "ssa/model.hpp"

namespace ssa {

inline constexpr std::size_t kBinaryHeaderBytes = 16;

void save_matrix(const std::filesystem::path& path, const Eigen::Ref<const RowMatrix>& m);
RowMatrix load_matrix(const std::filesystem::path& path);

void save_matrix_csv(const std::filesystem::path& path, const Eigen::Ref<const RowMatrix>& m);
RowMatrix load_matrix_csv(const std::filesystem::path& path);

void save_labels(const std::filesystem::path& path, const std::vector<Label>& labels);
std::vector<Label> load_labels(const std::filesystem::path& path);

/// Binary file size for a rows x cols matrix.
constexpr std::uint64_t binary_matrix_bytes(std::uint64_t rows, std::uint64_t cols) {
  return kBinaryHeaderBytes + 8 * rows * cols;
}

}  // namespace ssa
