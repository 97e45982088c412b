#include "fouriernet/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>

#include "fouriernet/error.hpp"

namespace fouriernet {

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
  std::string token;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(ch));
  }
  return token;
}

int parse_positive(const std::string& token, const std::filesystem::path& path) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(token, &used);
    if (used != token.size() || v <= 0) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw FormatError("bad PGM header field '" + token + "' in " + path.string());
  }
}

}  // namespace

void write_pgm(const std::filesystem::path& path, int height, int width,
               std::span<const std::uint8_t> samples) {
  if (samples.size() != static_cast<std::size_t>(height) * width) {
    throw ShapeMismatch("PGM sample count does not match dimensions");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(samples.data()),
            static_cast<std::streamsize>(samples.size()));
  if (!out) throw FormatError("failed writing " + path.string());
}

std::vector<std::uint8_t> read_pgm(const std::filesystem::path& path, int& height, int& width) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  if (next_token(in) != "P5") throw FormatError(path.string() + " is not a binary PGM (P5)");
  width = parse_positive(next_token(in), path);
  height = parse_positive(next_token(in), path);
  const int maxval = parse_positive(next_token(in), path);
  if (maxval != 255) throw FormatError(path.string() + ": only maxval 255 is supported");
  std::vector<std::uint8_t> samples(static_cast<std::size_t>(height) * width);
  in.read(reinterpret_cast<char*>(samples.data()), static_cast<std::streamsize>(samples.size()));
  if (in.gcount() != static_cast<std::streamsize>(samples.size())) {
    throw FormatError(path.string() + ": truncated pixel data");
  }
  return samples;
}

void write_mask_pgm(const std::filesystem::path& path, const BinaryMask& mask) {
  std::vector<std::uint8_t> samples(mask.size());
  std::transform(mask.data().begin(), mask.data().end(), samples.begin(),
                 [](std::uint8_t v) { return v ? std::uint8_t{255} : std::uint8_t{0}; });
  write_pgm(path, mask.height(), mask.width(), samples);
}

BinaryMask read_mask_pgm(const std::filesystem::path& path) {
  int h = 0, w = 0;
  auto samples = read_pgm(path, h, w);
  return BinaryMask(h, w, std::move(samples));
}

void write_image_pgm(const std::filesystem::path& path, const GrayImage& image) {
  std::vector<std::uint8_t> samples(image.data.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const float v = std::clamp(image.data[i], 0.0f, 1.0f);
    samples[i] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
  }
  write_pgm(path, image.height, image.width, samples);
}

GrayImage read_image_pgm(const std::filesystem::path& path) {
  GrayImage image;
  const auto samples = read_pgm(path, image.height, image.width);
  image.data.resize(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) image.data[i] = samples[i] / 255.0f;
  return image;
}

}  // namespace fouriernet
