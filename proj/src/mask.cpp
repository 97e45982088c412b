#include "fouriernet/mask.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "fouriernet/error.hpp"

namespace fouriernet {

BinaryMask::BinaryMask(int height, int width)
    : BinaryMask(height, width,
                 std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(height, 0)) *
                                           static_cast<std::size_t>(std::max(width, 0)))) {}

BinaryMask::BinaryMask(int height, int width, std::vector<std::uint8_t> data)
    : height_(height), width_(width), data_(std::move(data)) {
  if (height < 0 || width < 0) {
    throw InvalidDims("mask dimensions must be non-negative");
  }
  if (data_.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width)) {
    throw ShapeMismatch("mask data size " + std::to_string(data_.size()) + " != " +
                        std::to_string(height) + "x" + std::to_string(width));
  }
  for (auto& v : data_) v = v ? 1 : 0;
}

BinaryMask BinaryMask::from_predicate(int height, int width,
                                      const std::function<bool(int, int)>& inside) {
  std::vector<std::uint8_t> data(static_cast<std::size_t>(height) * width);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) data[static_cast<std::size_t>(r) * width + c] = inside(r, c);
  return BinaryMask(height, width, std::move(data));
}

BinaryMask BinaryMask::from_ascii(std::span<const std::string_view> rows) {
  const int h = static_cast<int>(rows.size());
  const int w = h ? static_cast<int>(rows[0].size()) : 0;
  std::vector<std::uint8_t> data;
  data.reserve(static_cast<std::size_t>(h) * w);
  for (auto row : rows) {
    if (static_cast<int>(row.size()) != w) throw ShapeMismatch("ragged ascii mask");
    for (char ch : row) data.push_back(ch == '#' ? 1 : 0);
  }
  return BinaryMask(h, w, std::move(data));
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

BinaryMask BinaryMask::translated(int drow, int dcol, int new_height, int new_width) const {
  return from_predicate(new_height, new_width, [&](int r, int c) {
    return contains(r - drow, c - dcol);
  });
}

BinaryMask Labeling::component_mask(int label) const {
  std::vector<std::uint8_t> data(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) data[i] = labels[i] == label;
  return BinaryMask(height, width, std::move(data));
}

namespace detail {

Labeling label_grid(int height, int width, std::span<const std::uint8_t> member,
                    Connectivity connectivity) {
  Labeling out;
  out.height = height;
  out.width = width;
  out.labels.assign(member.size(), Labeling::kBackground);

  static constexpr int kDr[8] = {-1, 1, 0, 0, -1, -1, 1, 1};
  static constexpr int kDc[8] = {0, 0, -1, 1, -1, 1, -1, 1};
  const int neighbours = connectivity == Connectivity::Eight ? 8 : 4;

  // Flood fill in raster discovery order; provisional ids are discovery ranks.
  std::vector<std::size_t> provisional_sizes;
  std::vector<int> stack;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const std::size_t idx = static_cast<std::size_t>(r) * width + c;
      if (!member[idx] || out.labels[idx] != Labeling::kBackground) continue;
      const int id = static_cast<int>(provisional_sizes.size());
      std::size_t size = 0;
      out.labels[idx] = id;
      stack.push_back(static_cast<int>(idx));
      while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        ++size;
        const int cr = cur / width, cc = cur % width;
        for (int k = 0; k < neighbours; ++k) {
          const int nr = cr + kDr[k], nc = cc + kDc[k];
          if (nr < 0 || nr >= height || nc < 0 || nc >= width) continue;
          const std::size_t nidx = static_cast<std::size_t>(nr) * width + nc;
          if (member[nidx] && out.labels[nidx] == Labeling::kBackground) {
            out.labels[nidx] = id;
            stack.push_back(static_cast<int>(nidx));
          }
        }
      }
      provisional_sizes.push_back(size);
    }
  }

  std::vector<int> order(provisional_sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return provisional_sizes[a] > provisional_sizes[b];
  });
  std::vector<int> rank(order.size());
  out.sizes.resize(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    rank[order[i]] = static_cast<int>(i);
    out.sizes[i] = provisional_sizes[order[i]];
  }
  for (auto& l : out.labels)
    if (l != Labeling::kBackground) l = rank[l];
  return out;
}

}  // namespace detail

Labeling connected_components(const BinaryMask& mask, Connectivity connectivity) {
  return detail::label_grid(mask.height(), mask.width(), mask.data(), connectivity);
}

}  // namespace fouriernet
