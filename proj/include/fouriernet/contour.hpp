#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fouriernet/mask.hpp"

namespace fouriernet {

struct Point2d {
  double row = 0.0;
  double col = 0.0;
};

// Closed, ordered outer boundary of a region, parameterized by arc length.
//
// points[0] is the topmost-then-leftmost boundary pixel and the sequence runs
// counterclockwise as the image is displayed (row axis pointing down). Arc
// length between consecutive points is their chord distance (1 or sqrt(2) for
// traced contours). radial[t] is the distance from the region centroid to
// points[t]. A point may repeat non-consecutively where the region is one pixel
// thick; consecutive points are always distinct.
class Contour {
 public:
  // Builds a contour from an explicit cycle and centroid. Points need not be
  // 8-adjacent; chord lengths are used as arc increments.
  static Contour from_points(std::vector<Pixel> points, Point2d centroid);

  std::size_t size() const { return points_.size(); }
  const std::vector<Pixel>& points() const { return points_; }
  const std::vector<double>& arc_lengths() const { return arc_lengths_; }
  double total_length() const { return total_length_; }
  const Point2d& centroid() const { return centroid_; }
  const std::vector<double>& radial() const { return radial_; }
  // Pixel count of the region the contour was traced from (0 for from_points).
  std::size_t region_size() const { return region_size_; }
  std::size_t distinct_points() const;

  // Same cycle started at points[start]; arc lengths re-accumulated from there.
  Contour rotated(std::size_t start) const;

 private:
  friend Contour trace_region(int, int, std::span<const std::uint8_t>, int, int);
  Contour() = default;
  void accumulate_arc_lengths();

  std::vector<Pixel> points_;
  std::vector<double> arc_lengths_;
  double total_length_ = 0.0;
  Point2d centroid_;
  std::vector<double> radial_;
  std::size_t region_size_ = 0;
};

double chord(const Pixel& a, const Pixel& b);

// Traces the outer boundary of the single 8-connected component in `component`.
// Throws DegenerateRegion for fewer than 3 pixels or fewer than 3 distinct
// boundary pixels, and std::invalid_argument if the mask holds several
// components.
Contour trace_contour(const BinaryMask& component);

// Traces the component with the given label.
Contour trace_contour(const Labeling& labeling, int label);

// Traces the region described by a membership grid whose (0, 0) cell sits at
// (row_offset, col_offset) in image coordinates. The region must be one
// 8-connected component; the centroid is taken over all member cells.
Contour trace_region(int height, int width, std::span<const std::uint8_t> member,
                     int row_offset = 0, int col_offset = 0);

}  // namespace fouriernet
