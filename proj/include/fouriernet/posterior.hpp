#pragma once

#include <cstddef>
#include <vector>

namespace fouriernet {

// Class index of the layer of interest in the posterior map.
inline constexpr int kForegroundClass = 1;

// Per-pixel class posteriors, channel-first.
struct PosteriorMap {
  int classes = 0;
  int height = 0;
  int width = 0;
  std::vector<float> data;

  float at(int cls, int row, int col) const {
    return data[(static_cast<std::size_t>(cls) * height + row) * width + col];
  }
  std::vector<float> channel(int cls) const;
};

}  // namespace fouriernet
