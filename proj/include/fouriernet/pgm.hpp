#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fouriernet/mask.hpp"

namespace fouriernet {

// Grayscale image with intensities in [0, 1], row-major.
struct GrayImage {
  int height = 0;
  int width = 0;
  std::vector<float> data;

  float at(int row, int col) const { return data[static_cast<std::size_t>(row) * width + col]; }
};

// Binary PGM (P5, maxval 255). Masks map 0 -> background, 255 -> foreground;
// on read any nonzero sample is foreground.
void write_mask_pgm(const std::filesystem::path& path, const BinaryMask& mask);
BinaryMask read_mask_pgm(const std::filesystem::path& path);

// Images are quantized to 8 bits: round(255 * clamp(v, 0, 1)).
void write_image_pgm(const std::filesystem::path& path, const GrayImage& image);
GrayImage read_image_pgm(const std::filesystem::path& path);

// Raw 8-bit P5 access.
void write_pgm(const std::filesystem::path& path, int height, int width,
               std::span<const std::uint8_t> samples);
std::vector<std::uint8_t> read_pgm(const std::filesystem::path& path, int& height, int& width);

}  // namespace fouriernet
