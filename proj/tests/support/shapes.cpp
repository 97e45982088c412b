#include "shapes.hpp"

#include <cmath>
#include <numbers>

namespace fouriernet::fixtures {

BinaryMask rasterize_polygon(const std::vector<Vec2>& v, int height, int width) {
  return BinaryMask::from_predicate(height, width, [&](int r, int c) {
    const double px = c, py = r;
    bool inside = false;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
      if ((v[i].y > py) != (v[j].y > py)) {
        const double x_cross = v[j].x + (py - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
        if (px < x_cross) inside = !inside;
      }
    }
    return inside;
  });
}

BinaryMask disk(int height, int width, double cr, double cc, double radius) {
  return BinaryMask::from_predicate(height, width, [&](int r, int c) {
    return (r - cr) * (r - cr) + (c - cc) * (c - cc) <= radius * radius;
  });
}

BinaryMask filled_rect(int height, int width, int row0, int col0, int rows, int cols) {
  return BinaryMask::from_predicate(height, width, [&](int r, int c) {
    return r >= row0 && r < row0 + rows && c >= col0 && c < col0 + cols;
  });
}

StarShape random_star(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(0.05, 0.25);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  StarShape s;
  for (std::size_t k = 0; k < 3; ++k) {
    s.amplitudes[k] = amp(rng);
    s.phases[k] = phase(rng);
  }
  return s;
}

std::vector<Vec2> star_polygon(const StarShape& shape, double scale, Vec2 center) {
  std::vector<Vec2> out;
  for (int i = 0; i < shape.vertices; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / shape.vertices;
    double r = 1.0;
    for (std::size_t k = 0; k < 3; ++k) {
      r += shape.amplitudes[k] * std::cos((k + 1) * theta + shape.phases[k]);
    }
    out.push_back({center.x + scale * r * std::cos(theta), center.y + scale * r * std::sin(theta)});
  }
  return out;
}

}  // namespace fouriernet::fixtures
