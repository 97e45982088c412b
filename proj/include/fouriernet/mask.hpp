#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace fouriernet {

struct Pixel {
  int row = 0;
  int col = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
};

enum class Connectivity { Four = 4, Eight = 8 };

// Immutable H x W boolean grid, row-major. true = foreground (layer pixel).
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int height, int width);  // all background
  BinaryMask(int height, int width, std::vector<std::uint8_t> data);

  static BinaryMask from_predicate(int height, int width,
                                   const std::function<bool(int, int)>& inside);
  // Rows of '#' (foreground) and '.' (background); convenient for fixtures.
  static BinaryMask from_ascii(std::span<const std::string_view> rows);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }

  bool at(int row, int col) const {
    return data_[static_cast<std::size_t>(row) * width_ + col] != 0;
  }
  bool contains(int row, int col) const {
    return row >= 0 && row < height_ && col >= 0 && col < width_ && at(row, col);
  }
  std::span<const std::uint8_t> data() const { return data_; }
  std::size_t count() const;

  BinaryMask translated(int drow, int dcol, int new_height, int new_width) const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> data_;
};

// Result of connected-component labeling. Labels are ranks: label 0 is the
// largest component; equal sizes keep raster discovery order.
struct Labeling {
  static constexpr int kBackground = -1;

  int height = 0;
  int width = 0;
  std::vector<int> labels;              // H*W, kBackground for background
  std::vector<std::size_t> sizes;       // pixel count per label, descending

  int at(int row, int col) const {
    return labels[static_cast<std::size_t>(row) * width + col];
  }
  std::size_t component_count() const { return sizes.size(); }
  BinaryMask component_mask(int label) const;
};

Labeling connected_components(const BinaryMask& mask,
                              Connectivity connectivity = Connectivity::Eight);

namespace detail {

// Labels an arbitrary membership grid; shared by mask labeling and the
// descriptor-map peeling which works on bounding-box-local grids.
Labeling label_grid(int height, int width, std::span<const std::uint8_t> member,
                    Connectivity connectivity);

}  // namespace detail

}  // namespace fouriernet
