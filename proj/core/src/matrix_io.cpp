#include "ssa/matrix_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "ssa/errors.hpp"

namespace ssa {

namespace {

constexpr std::array<char, 4> kMagic{'S', 'S', 'A', '1'};

void put_u32(std::string& buf, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) buf.push_back(static_cast<char>((v >> (8 * b)) & 0xFFu));
}

void put_u64(std::string& buf, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) buf.push_back(static_cast<char>((v >> (8 * b)) & 0xFFu));
}

std::uint64_t get_le(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int b = 0; b < bytes; ++b) v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  return v;
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_all(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw InputError("failed writing " + path.string());
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const int n = std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return std::string(buf.data(), static_cast<std::size_t>(n));
}

double parse_double(std::string_view field, const std::filesystem::path& path, std::size_t line) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw InputError(path.string() + ":" + std::to_string(line) + ": bad number '" + std::string(field) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

}  // namespace

void save_matrix(const std::filesystem::path& path, const Eigen::Ref<const RowMatrix>& m) {
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (static_cast<std::uint64_t>(m.rows()) > kMax || static_cast<std::uint64_t>(m.cols()) > kMax) {
    throw InputError("matrix dimensions overflow the 32-bit header fields");
  }
  std::string buf;
  buf.reserve(binary_matrix_bytes(static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())));
  buf.append(kMagic.data(), kMagic.size());
  put_u32(buf, static_cast<std::uint32_t>(m.rows()));
  put_u32(buf, static_cast<std::uint32_t>(m.cols()));
  put_u32(buf, 0);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) put_u64(buf, std::bit_cast<std::uint64_t>(m(i, j)));
  }
  write_all(path, buf);
}

RowMatrix load_matrix(const std::filesystem::path& path) {
  const std::string data = read_all(path);
  if (data.size() < kBinaryHeaderBytes || !std::equal(kMagic.begin(), kMagic.end(), data.begin())) {
    throw InputError(path.string() + ": malformed header (expected SSA1 binary matrix)");
  }
  const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());
  const std::uint64_t rows = get_le(bytes + 4, 4);
  const std::uint64_t cols = get_le(bytes + 8, 4);
  if (rows != 0 && cols > (std::numeric_limits<std::uint64_t>::max() - kBinaryHeaderBytes) / 8 / rows) {
    throw InputError(path.string() + ": dimension overflow");
  }
  if (data.size() != binary_matrix_bytes(rows, cols)) {
    throw InputError(path.string() + ": size " + std::to_string(data.size()) + " does not match header " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
  RowMatrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  const unsigned char* p = bytes + kBinaryHeaderBytes;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j, p += 8) m(i, j) = std::bit_cast<double>(get_le(p, 8));
  }
  return m;
}

void save_matrix_csv(const std::filesystem::path& path, const Eigen::Ref<const RowMatrix>& m) {
  std::string buf;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) buf.push_back(',');
      buf += format_double(m(i, j));
    }
    buf.push_back('\n');
  }
  write_all(path, buf);
}

RowMatrix load_matrix_csv(const std::filesystem::path& path) {
  const auto lines = lines_of(read_all(path));
  std::vector<std::vector<double>> rows;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    std::vector<double> row;
    for (auto field : split(lines[n], ',')) row.push_back(parse_double(field, path, n + 1));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InputError(path.string() + ":" + std::to_string(n + 1) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError(path.string() + ": empty matrix file");
  RowMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  return m;
}

void save_labels(const std::filesystem::path& path, const std::vector<Label>& labels) {
  std::string buf;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    buf += std::to_string(i);
    buf.push_back(',');
    buf += labels[i] ? std::to_string(*labels[i]) : std::string("-");
    buf.push_back('\n');
  }
  write_all(path, buf);
}

std::vector<Label> load_labels(const std::filesystem::path& path) {
  const auto lines = lines_of(read_all(path));
  std::vector<Label> labels;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const auto fields = split(lines[n], ',');
    const std::string where = path.string() + ":" + std::to_string(n + 1);
    if (fields.size() != 2) throw InputError(where + ": expected sample_index,class_id");
    const double index = parse_double(fields[0], path, n + 1);
    if (index != static_cast<double>(labels.size())) throw InputError(where + ": sample indices must be 0,1,2,...");
    std::string_view cls = fields[1];
    while (!cls.empty() && cls.front() == ' ') cls.remove_prefix(1);
    while (!cls.empty() && cls.back() == ' ') cls.remove_suffix(1);
    if (cls == "-") {
      labels.emplace_back(std::nullopt);
      continue;
    }
    int id = 0;
    const auto [ptr, ec] = std::from_chars(cls.data(), cls.data() + cls.size(), id);
    if (ec != std::errc() || ptr != cls.data() + cls.size() || id < 0) {
      throw InputError(where + ": bad class id '" + std::string(cls) + "'");
    }
    labels.emplace_back(id);
  }
  if (labels.empty()) throw InputError(path.string() + ": no labels");
  return labels;
}

}  // namespace ssa
