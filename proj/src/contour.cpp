#include "fouriernet/contour.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "fouriernet/error.hpp"

namespace fouriernet {

namespace {

// Moore neighbourhood, clockwise on screen (row axis down), starting west.
constexpr int kDr[8] = {0, -1, -1, -1, 0, 1, 1, 1};
constexpr int kDc[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

int direction_of(int dr, int dc) {
  for (int k = 0; k < 8; ++k)
    if (kDr[k] == dr && kDc[k] == dc) return k;
  throw std::logic_error("backtrack pixel is not a Moore neighbour");
}

}  // namespace

double chord(const Pixel& a, const Pixel& b) {
  const int dr = std::abs(a.row - b.row);
  const int dc = std::abs(a.col - b.col);
  if (dr + dc == 1) return 1.0;
  if (dr == 1 && dc == 1) return std::numbers::sqrt2;
  return std::hypot(static_cast<double>(dr), static_cast<double>(dc));
}

void Contour::accumulate_arc_lengths() {
  const std::size_t t_count = points_.size();
  arc_lengths_.assign(t_count, 0.0);
  double l = 0.0;
  for (std::size_t t = 1; t < t_count; ++t) {
    const double step = chord(points_[t - 1], points_[t]);
    if (step == 0.0) throw DegenerateRegion("duplicate consecutive contour points");
    l += step;
    arc_lengths_[t] = l;
  }
  const double closing = chord(points_[t_count - 1], points_[0]);
  if (closing == 0.0) throw DegenerateRegion("contour closes on a duplicate point");
  total_length_ = l + closing;
}

std::size_t Contour::distinct_points() const {
  std::set<std::pair<int, int>> seen;
  for (const auto& p : points_) seen.emplace(p.row, p.col);
  return seen.size();
}

Contour Contour::from_points(std::vector<Pixel> points, Point2d centroid) {
  Contour c;
  c.points_ = std::move(points);
  if (c.points_.size() < 3 || c.distinct_points() < 3) {
    throw DegenerateRegion("contour needs at least 3 distinct points");
  }
  c.centroid_ = centroid;
  c.accumulate_arc_lengths();
  c.radial_.reserve(c.points_.size());
  for (const auto& p : c.points_) {
    c.radial_.push_back(std::hypot(p.row - centroid.row, p.col - centroid.col));
  }
  return c;
}

Contour Contour::rotated(std::size_t start) const {
  Contour c = *this;
  const auto shift = static_cast<std::ptrdiff_t>(start % points_.size());
  std::rotate(c.points_.begin(), c.points_.begin() + shift, c.points_.end());
  std::rotate(c.radial_.begin(), c.radial_.begin() + shift, c.radial_.end());
  c.accumulate_arc_lengths();
  return c;
}

Contour trace_region(int height, int width, std::span<const std::uint8_t> member,
                     int row_offset, int col_offset) {
  auto inside = [&](int r, int c) {
    return r >= 0 && r < height && c >= 0 && c < width &&
           member[static_cast<std::size_t>(r) * width + c] != 0;
  };

  // Integer moments keep the radial samples bit-identical under translation.
  std::int64_t n = 0, sum_r = 0, sum_c = 0;
  Pixel start{-1, -1};
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (!inside(r, c)) continue;
      if (n == 0) start = {r, c};
      ++n;
      sum_r += r + row_offset;
      sum_c += c + col_offset;
    }
  }
  if (n < 3) {
    throw DegenerateRegion("region has " + std::to_string(n) + " pixel(s), need at least 3");
  }

  // One Moore step from `cur`, scanning clockwise after the backtrack direction.
  auto step = [&](Pixel cur, int back, Pixel& next, int& next_back) {
    for (int k = 1; k <= 8; ++k) {
      const int idx = (back + k) % 8;
      const Pixel cand{cur.row + kDr[idx], cur.col + kDc[idx]};
      if (inside(cand.row, cand.col)) {
        const int prev = (idx + 7) % 8;
        next = cand;
        next_back = direction_of(cur.row + kDr[prev] - cand.row, cur.col + kDc[prev] - cand.col);
        return true;
      }
    }
    return false;
  };

  std::vector<Pixel> clockwise{start};
  Pixel second{};
  int back = 0;  // west of the raster-first pixel is always outside
  if (!step(start, 0, second, back)) {
    throw DegenerateRegion("isolated pixel has no boundary cycle");
  }
  Pixel cur = second;
  const std::size_t max_steps = 8 * static_cast<std::size_t>(n) + 16;
  for (std::size_t guard = 0;; ++guard) {
    if (guard > max_steps) throw std::logic_error("Moore tracing failed to close");
    Pixel next{};
    int next_back = 0;
    step(cur, back, next, next_back);
    if (cur == start && next == second) break;
    clockwise.push_back(cur);
    cur = next;
    back = next_back;
  }

  Contour contour;
  contour.points_.reserve(clockwise.size());
  contour.points_.push_back({start.row + row_offset, start.col + col_offset});
  for (std::size_t i = clockwise.size() - 1; i >= 1; --i) {
    contour.points_.push_back({clockwise[i].row + row_offset, clockwise[i].col + col_offset});
  }
  if (contour.points_.size() < 3 || contour.distinct_points() < 3) {
    throw DegenerateRegion("traced boundary has fewer than 3 distinct pixels");
  }
  contour.region_size_ = static_cast<std::size_t>(n);
  contour.centroid_ = {static_cast<double>(sum_r) / static_cast<double>(n),
                       static_cast<double>(sum_c) / static_cast<double>(n)};
  contour.accumulate_arc_lengths();
  contour.radial_.reserve(contour.points_.size());
  const double dn = static_cast<double>(n);
  for (const auto& p : contour.points_) {
    const auto dr = static_cast<double>(n * p.row - sum_r);
    const auto dc = static_cast<double>(n * p.col - sum_c);
    contour.radial_.push_back(std::hypot(dr, dc) / dn);
  }
  return contour;
}

Contour trace_contour(const BinaryMask& component) {
  const Labeling labeling = connected_components(component, Connectivity::Eight);
  if (labeling.component_count() > 1) {
    throw std::invalid_argument("trace_contour expects a single component, got " +
                                std::to_string(labeling.component_count()));
  }
  return trace_region(component.height(), component.width(), component.data());
}

Contour trace_contour(const Labeling& labeling, int label) {
  std::vector<std::uint8_t> member(labeling.labels.size());
  for (std::size_t i = 0; i < member.size(); ++i) member[i] = labeling.labels[i] == label;
  return trace_region(labeling.height, labeling.width, member);
}

}  // namespace fouriernet
