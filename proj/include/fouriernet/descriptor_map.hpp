#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "fouriernet/mask.hpp"

namespace fouriernet {

// H x W x N amplitude maps, row-major with the channel index fastest.
class DescriptorMap {
 public:
  DescriptorMap() = default;
  DescriptorMap(int height, int width, int order);  // zero-filled

  int height() const { return height_; }
  int width() const { return width_; }
  int order() const { return order_; }

  float at(int row, int col, int channel) const { return data_[index(row, col, channel)]; }
  float& at(int row, int col, int channel) { return data_[index(row, col, channel)]; }
  const std::vector<float>& data() const { return data_; }
  std::vector<float>& data() { return data_; }

  // Channel `channel` as a row-major H x W plane.
  std::vector<float> channel(int channel) const;

  friend bool operator==(const DescriptorMap&, const DescriptorMap&) = default;

 private:
  std::size_t index(int row, int col, int channel) const {
    return (static_cast<std::size_t>(row) * width_ + col) * order_ + channel;
  }

  int height_ = 0;
  int width_ = 0;
  int order_ = 0;
  std::vector<float> data_;
};

// Peels every 8-connected component ring by ring: each ring is the traced outer
// contour of what is left, and all its pixels receive that contour's first
// `order` harmonic amplitudes. Splits recurse per piece; remnants too small to
// trace inherit the last ring of their branch. Background stays 0.
DescriptorMap generate_descriptor_maps(const BinaryMask& mask, int order);

// Same as above but also reports the number of peel iterations spent on each
// top-level component (in label order).
DescriptorMap generate_descriptor_maps(const BinaryMask& mask, int order,
                                       std::vector<int>* iterations_per_component);

double map_error(const DescriptorMap& predicted, const DescriptorMap& target);

// "FDM1" container: 16-byte little-endian header (magic, H, W, N) followed by
// H*W*N little-endian float32 values.
void write_fdm(const std::filesystem::path& path, const DescriptorMap& map);
DescriptorMap read_fdm(const std::filesystem::path& path);

// One PGM per channel, min-max normalized to 0..255 (constant channels -> 0).
void write_channel_pgms(const std::filesystem::path& directory, const std::string& stem,
                        const DescriptorMap& map);

}  // namespace fouriernet
