#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "fouriernet/contour.hpp"
#include "fouriernet/error.hpp"
#include "shapes.hpp"

using namespace fouriernet;

namespace {

bool is_boundary(const BinaryMask& m, const Pixel& p) {
  const int dr[] = {-1, 1, 0, 0}, dc[] = {0, 0, -1, 1};
  for (int k = 0; k < 4; ++k) {
    if (!m.contains(p.row + dr[k], p.col + dc[k])) return true;
  }
  return false;
}

// Sign of the shoelace sum with x = col, y = row.
double shoelace(const std::vector<Pixel>& pts) {
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    const auto& q = pts[(i + 1) % pts.size()];
    s += static_cast<double>(p.col) * q.row - static_cast<double>(q.col) * p.row;
  }
  return s;
}

void expect_contour_invariants(const BinaryMask& component, const Contour& c) {
  ASSERT_GE(c.size(), 3u);
  EXPECT_EQ(c.arc_lengths().front(), 0.0);
  double acc = 0.0;
  for (std::size_t t = 0; t < c.size(); ++t) {
    const auto& p = c.points()[t];
    const auto& q = c.points()[(t + 1) % c.size()];
    EXPECT_TRUE(component.at(p.row, p.col));
    EXPECT_TRUE(is_boundary(component, p));
    EXPECT_LE(std::abs(p.row - q.row), 1);
    EXPECT_LE(std::abs(p.col - q.col), 1);
    EXPECT_FALSE(p == q);
    EXPECT_EQ(c.arc_lengths()[t], acc);
    acc += chord(p, q);
    EXPECT_NEAR(c.radial()[t], std::hypot(p.row - c.centroid().row, p.col - c.centroid().col), 1e-12);
  }
  EXPECT_EQ(acc, c.total_length());
}

}  // namespace

TEST(TraceContour, TwoPixelsAreDegenerate) {
  const auto mask = fixtures::filled_rect(3, 4, 1, 1, 1, 2);
  EXPECT_THROW(trace_contour(mask), DegenerateRegion);
}

TEST(TraceContour, ThreeCollinearPixelsAreTraced) {
  const auto mask = fixtures::filled_rect(3, 5, 1, 1, 1, 3);
  const auto c = trace_contour(mask);
  EXPECT_EQ(c.distinct_points(), 3u);
  EXPECT_EQ(c.size(), 4u);  // out and back along the line
  EXPECT_DOUBLE_EQ(c.total_length(), 4.0);
}

TEST(TraceContour, SeveralComponentsRejected) {
  auto mask = BinaryMask::from_predicate(6, 6, [](int r, int c) { return (r < 2 && c < 2) || (r > 3 && c > 3); });
  EXPECT_THROW(trace_contour(mask), std::invalid_argument);
}

// Moore tracing walks the 8 ring pixels with axial steps only, so the length
// is 8 (not 4 + 4 sqrt 2).
TEST(TraceContour, FilledThreeByThreeSquare) {
  const auto mask = fixtures::filled_rect(3, 3, 0, 0, 3, 3);
  const auto c = trace_contour(mask);
  EXPECT_EQ(c.size(), 8u);
  EXPECT_DOUBLE_EQ(c.total_length(), 8.0);
  EXPECT_DOUBLE_EQ(c.centroid().row, 1.0);
  EXPECT_DOUBLE_EQ(c.centroid().col, 1.0);
  EXPECT_EQ(c.points()[0], (Pixel{0, 0}));
  // Counterclockwise as displayed: down the left edge first.
  EXPECT_EQ(c.points()[1], (Pixel{1, 0}));
  EXPECT_LT(shoelace(c.points()), 0.0);
  expect_contour_invariants(mask, c);
}

TEST(TraceContour, DiamondUsesDiagonalSteps) {
  const auto mask = BinaryMask::from_predicate(5, 5, [](int r, int c) { return std::abs(r - 2) + std::abs(c - 2) <= 1; });
  const auto c = trace_contour(mask);
  EXPECT_EQ(c.size(), 4u);
  EXPECT_NEAR(c.total_length(), 4.0 * std::sqrt(2.0), 1e-15);
}

TEST(TraceContour, DiskRadiusTwenty) {
  const auto mask = fixtures::disk(64, 64, 32, 32, 20);
  const auto c = trace_contour(mask);
  EXPECT_NEAR(c.centroid().row, 32.0, 0.5);
  EXPECT_NEAR(c.centroid().col, 32.0, 0.5);
  for (double xi : c.radial()) {
    EXPECT_GE(xi, 19.0);
    EXPECT_LE(xi, 21.0);
  }
  EXPECT_EQ(c.region_size(), mask.count());
  expect_contour_invariants(mask, c);
}

TEST(TraceContour, StarPolygonsSatisfyInvariants) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto shape = fixtures::random_star(rng);
    const auto mask = fixtures::rasterize_polygon(fixtures::star_polygon(shape, 18.0, {32.0, 32.0}), 64, 64);
    const auto lab = connected_components(mask);
    const auto component = lab.component_mask(0);
    const auto c = trace_contour(component);
    expect_contour_invariants(component, c);
    EXPECT_LT(shoelace(c.points()), 0.0);
    const Pixel first = c.points()[0];
    for (int r = 0; r < component.height(); ++r) {
      for (int col = 0; col < component.width(); ++col) {
        if (component.at(r, col)) {
          EXPECT_TRUE(r > first.row || (r == first.row && col >= first.col));
        }
      }
    }
  }
}

TEST(TraceContour, TranslationIsBitExact) {
  std::mt19937_64 rng(3);
  const auto shape = fixtures::random_star(rng);
  const auto base = fixtures::rasterize_polygon(fixtures::star_polygon(shape, 12.0, {20.0, 20.0}), 40, 40);
  const auto component = connected_components(base).component_mask(0);
  const auto moved = component.translated(17, 29, 80, 90);
  const auto a = trace_contour(component);
  const auto b = trace_contour(moved);
  ASSERT_EQ(a.size(), b.size());
  EXPECT_EQ(a.arc_lengths(), b.arc_lengths());
  EXPECT_EQ(a.total_length(), b.total_length());
  EXPECT_EQ(a.radial(), b.radial());
  EXPECT_DOUBLE_EQ(b.centroid().row, a.centroid().row + 17);
  EXPECT_DOUBLE_EQ(b.centroid().col, a.centroid().col + 29);
  for (std::size_t t = 0; t < a.size(); ++t) {
    EXPECT_EQ(b.points()[t], (Pixel{a.points()[t].row + 17, a.points()[t].col + 29}));
  }
}

TEST(TraceContour, HolesAreIgnored) {
  const auto ring = BinaryMask::from_predicate(7, 7, [](int r, int c) {
    const bool outer = r >= 1 && r <= 5 && c >= 1 && c <= 5;
    return outer && !(r == 3 && c == 3);
  });
  const auto c = trace_contour(ring);
  EXPECT_EQ(c.size(), 16u);
  EXPECT_EQ(c.region_size(), 24u);
}

TEST(Contour, RotatedRestartsArcLength) {
  const auto c = trace_contour(fixtures::filled_rect(6, 6, 1, 1, 4, 3));
  const auto r = c.rotated(3);
  EXPECT_EQ(r.points()[0], c.points()[3]);
  EXPECT_EQ(r.arc_lengths()[0], 0.0);
  EXPECT_DOUBLE_EQ(r.total_length(), c.total_length());
  EXPECT_EQ(r.radial()[0], c.radial()[3]);
}

TEST(Contour, FromPointsUsesChords) {
  const auto c = Contour::from_points({{0, 0}, {0, 3}, {4, 3}}, {1.0, 1.0});
  EXPECT_DOUBLE_EQ(c.total_length(), 12.0);
  EXPECT_DOUBLE_EQ(c.arc_lengths()[2], 7.0);
  EXPECT_DOUBLE_EQ(c.radial()[0], std::sqrt(2.0));
}
