#include "ssa/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "ssa/errors.hpp"

namespace ssa {

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in, const std::filesystem::path& path) {
  std::string token;
  int ch = 0;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!token.empty()) return token;
      continue;
    }
    token.push_back(static_cast<char>(ch));
  }
  if (token.empty()) throw InputError(path.string() + ": truncated PGM header");
  return token;
}

long header_number(std::istream& in, const std::filesystem::path& path) {
  const std::string token = header_token(in, path);
  try {
    std::size_t used = 0;
    const long value = std::stol(token, &used);
    if (used != token.size()) throw InputError(path.string() + ": bad PGM header field '" + token + "'");
    return value;
  } catch (const std::logic_error&) {
    throw InputError(path.string() + ": bad PGM header field '" + token + "'");
  }
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open image " + path.string());
  if (header_token(in, path) != "P5") throw InputError(path.string() + ": not a binary PGM (P5) file");
  const long width = header_number(in, path);
  const long height = header_number(in, path);
  const long maxval = header_number(in, path);
  if (width <= 0 || height <= 0 || width > 65535 || height > 65535) {
    throw InputError(path.string() + ": bad PGM dimensions");
  }
  if (maxval <= 0 || maxval > 255) throw InputError(path.string() + ": only 8-bit PGM is supported");

  std::vector<unsigned char> raw(static_cast<std::size_t>(width * height));
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw InputError(path.string() + ": truncated PGM data");

  GrayImage image(height, width);
  for (long r = 0; r < height; ++r) {
    for (long c = 0; c < width; ++c) image(r, c) = raw[static_cast<std::size_t>(r * width + c)];
  }
  return image;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write image " + path.string());
  out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
  std::vector<unsigned char> raw(static_cast<std::size_t>(image.size()));
  for (Index r = 0; r < image.rows(); ++r) {
    for (Index c = 0; c < image.cols(); ++c) {
      const double v = std::clamp(std::round(image(r, c)), 0.0, 255.0);
      raw[static_cast<std::size_t>(r * image.cols() + c)] = static_cast<unsigned char>(v);
    }
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw InputError("failed writing image " + path.string());
}

GrayImage PgmLoader::load(const std::filesystem::path& path) const { return read_pgm(path); }

}  // namespace ssa
