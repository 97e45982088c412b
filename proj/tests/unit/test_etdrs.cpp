#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "etdrs_sampling.hpp"
#include "fouriernet/error.hpp"
#include "fouriernet/etdrs.hpp"

using namespace fouriernet;

namespace {

std::vector<BinaryMask> band_stack(int slices, int h, int w, int top, int thickness) {
  std::vector<BinaryMask> stack;
  for (int s = 0; s < slices; ++s) {
    stack.push_back(BinaryMask::from_predicate(h, w, [&](int r, int) { return r >= top && r < top + thickness; }));
  }
  return stack;
}

struct VoxelOracle {
  double volume = 0.0;
  double thickness_um = 0.0;
};

// Counts voxels one by one instead of per A-scan.
VoxelOracle count_voxels(const std::vector<BinaryMask>& stack, const EtdrsGrid& g) {
  VoxelOracle o;
  double thickness_sum = 0.0;
  std::size_t ascans = 0;
  for (std::size_t b = 0; b < stack.size(); ++b) {
    for (int c = 0; c < stack[b].width(); ++c) {
      const double dx = (c - g.center_ascan) * g.lateral_mm_per_ascan;
      const double dy = (g.center_bscan - static_cast<double>(b)) * g.slice_spacing_mm;
      if (dx * dx + dy * dy >= 9.0) continue;
      ++ascans;
      for (int r = 0; r < stack[b].height(); ++r) {
        if (!stack[b].at(r, c)) continue;
        o.volume += g.lateral_mm_per_ascan * g.slice_spacing_mm * g.axial_mm_per_pixel;
        thickness_sum += g.axial_mm_per_pixel;
      }
    }
  }
  o.thickness_um = ascans ? 1000.0 * thickness_sum / ascans : 0.0;
  return o;
}

}  // namespace

TEST(Sectors, Examples) {
  EXPECT_EQ(sector_at(0.0, 0.0, EyeSide::Right), Sector::Central);
  EXPECT_EQ(sector_at(0.0, 1.0, EyeSide::Right), Sector::InnerSuperior);
  EXPECT_EQ(sector_at(0.0, -1.0, EyeSide::Left), Sector::InnerInferior);
  // Toward the nose of a left eye is -dx; the same direction is temporal for a right eye.
  EXPECT_EQ(sector_at(-2.0, 0.0, EyeSide::Left), Sector::OuterNasal);
  EXPECT_EQ(sector_at(-2.0, 0.0, EyeSide::Right), Sector::OuterTemporal);
  EXPECT_EQ(sector_at(2.0, 0.0, EyeSide::Right), Sector::OuterNasal);
  EXPECT_EQ(sector_at(3.5, 0.0, EyeSide::Right), Sector::Outside);
}

TEST(Sectors, RingBoundariesGoOutward) {
  EXPECT_EQ(sector_at(0.0, 0.5, EyeSide::Right), Sector::InnerSuperior);
  EXPECT_EQ(sector_at(0.0, 0.4999999, EyeSide::Right), Sector::Central);
  EXPECT_EQ(sector_at(0.0, 1.5, EyeSide::Right), Sector::OuterSuperior);
  EXPECT_EQ(sector_at(0.0, 3.0, EyeSide::Right), Sector::Outside);
  EXPECT_EQ(sector_at(0.0, 2.9999999, EyeSide::Right), Sector::OuterSuperior);
}

TEST(Sectors, DiagonalsGoCounterclockwise) {
  // 45 deg -> superior, 135 -> left, 225 -> inferior, 315 -> right.
  EXPECT_EQ(sector_at(1.0, 1.0, EyeSide::Right), Sector::InnerSuperior);
  EXPECT_EQ(sector_at(1.5, 1.5, EyeSide::Right), Sector::OuterSuperior);
  EXPECT_EQ(sector_at(-1.5, 1.5, EyeSide::Right), Sector::OuterTemporal);
  EXPECT_EQ(sector_at(-1.5, -1.5, EyeSide::Right), Sector::OuterInferior);
  EXPECT_EQ(sector_at(1.5, -1.5, EyeSide::Right), Sector::OuterNasal);
  EXPECT_EQ(sector_at(-1.5, 1.5, EyeSide::Left), Sector::OuterNasal);
}

TEST(Sectors, GridCoordinates) {
  const EtdrsGrid g = EtdrsGrid::centered(49, 512);
  EXPECT_DOUBLE_EQ(g.center_bscan, 24.0);
  EXPECT_DOUBLE_EQ(g.center_ascan, 255.5);
  // 8 slices toward index 16 = 1 mm superior.
  EXPECT_EQ(sector_of(g, 16.0, 255.5), Sector::InnerSuperior);
  EXPECT_EQ(sector_of(g, 24.0, 255.5), Sector::Central);
  EXPECT_EQ(sector_of(g, 40.0, 255.5), Sector::OuterInferior);
  EXPECT_EQ(sector_of(g, 24.0, 255.5 + 1.0 / 0.011), Sector::InnerNasal);
}

TEST(Sectors, AnalyticAreas) {
  const double pi = std::numbers::pi;
  EXPECT_DOUBLE_EQ(sector_area(Sector::Central), pi * 0.25);
  EXPECT_DOUBLE_EQ(sector_area(Sector::InnerNasal), pi * (2.25 - 0.25) / 4);
  EXPECT_DOUBLE_EQ(sector_area(Sector::OuterSuperior), pi * (9.0 - 2.25) / 4);
  EXPECT_EQ(sector_area(Sector::Outside), 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < kSectorCount; ++k) total += sector_area(static_cast<Sector>(k));
  EXPECT_NEAR(total, 9.0 * pi, 1e-12);
}

TEST(Sectors, MonteCarloAreasWithinHalfPercent) {
  for (EyeSide eye : {EyeSide::Right, EyeSide::Left}) {
    const auto areas = fixtures::sampled_sector_areas(eye, 1000, 123);
    for (std::size_t k = 0; k < kSectorCount; ++k) {
      const double want = sector_area(static_cast<Sector>(k));
      EXPECT_NEAR(areas[k], want, 0.005 * want) << sector_name(static_cast<Sector>(k));
    }
  }
}

TEST(Grid, ValidationAndConfig) {
  EtdrsGrid g;
  EXPECT_NO_THROW(g.validate());
  g.axial_mm_per_pixel = 0.0;
  EXPECT_THROW(g.validate(), ConfigError);
  const auto kv = KvConfig::parse("eye = left\ncenter_bscan = 3\nslice_spacing_mm = 0.25\n");
  const auto c = EtdrsGrid::from_config(kv, EtdrsGrid::centered(9, 64));
  EXPECT_EQ(c.eye, EyeSide::Left);
  EXPECT_EQ(c.center_bscan, 3.0);
  EXPECT_EQ(c.center_ascan, 31.5);
  EXPECT_EQ(c.slice_spacing_mm, 0.25);
  EXPECT_THROW(EtdrsGrid::from_config(KvConfig::parse("eye = middle"), EtdrsGrid{}), ConfigError);
  const auto s = scaled_grid(49, 64, 128);
  EXPECT_DOUBLE_EQ(s.lateral_mm_per_ascan, 0.044);
  EXPECT_DOUBLE_EQ(s.axial_mm_per_pixel, 0.0156);
}

TEST(Volume, EmptyStack) {
  const auto r = volume_and_thickness(band_stack(49, 16, 64, 0, 0), scaled_grid(49, 16, 64));
  EXPECT_EQ(r.total_volume_mm3, 0.0);
  EXPECT_EQ(r.average_thickness_um, 0.0);
  EXPECT_GT(r.ascans_in_disk, 0u);
}

TEST(Volume, UniformTenPixelBand) {
  const EtdrsGrid g = EtdrsGrid::centered(49, 512);
  const auto stack = band_stack(49, 64, 512, 20, 10);
  const auto r = volume_and_thickness(stack, g);
  EXPECT_NEAR(r.average_thickness_um, 39.0, 39.0 * 1e-12);
  const double disk_area = r.ascans_in_disk * g.lateral_mm_per_ascan * g.slice_spacing_mm;
  EXPECT_NEAR(r.total_volume_mm3, 0.039 * disk_area, 1e-12);
  const auto oracle = count_voxels(stack, g);
  EXPECT_NEAR(r.total_volume_mm3, oracle.volume, 1e-9 * oracle.volume);
  EXPECT_NEAR(r.average_thickness_um, oracle.thickness_um, 1e-9 * oracle.thickness_um);
  EXPECT_EQ(r.voxels_in_disk, r.ascans_in_disk * 10);
}

TEST(Volume, RandomStacksMatchVoxelCountAndAddUp) {
  std::mt19937_64 rng(4);
  std::bernoulli_distribution coin(0.3);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<BinaryMask> stack;
    for (int s = 0; s < 25; ++s) stack.push_back(BinaryMask::from_predicate(32, 128, [&](int, int) { return coin(rng); }));
    EtdrsGrid g = scaled_grid(25, 32, 128);
    g.center_ascan += 7.3;
    g.center_bscan -= 2.0;
    const auto r = volume_and_thickness(stack, g);
    const auto o = count_voxels(stack, g);
    EXPECT_NEAR(r.total_volume_mm3, o.volume, 1e-9 * o.volume);
    EXPECT_NEAR(r.average_thickness_um, o.thickness_um, 1e-9 * o.thickness_um);
    double sectors = 0.0;
    std::size_t ascans = 0;
    for (std::size_t k = 0; k < kSectorCount; ++k) {
      sectors += r.sector_volume_mm3[k];
      ascans += r.sector_ascans[k];
    }
    EXPECT_NEAR(sectors, r.total_volume_mm3, 1e-12 * r.total_volume_mm3);
    EXPECT_EQ(ascans, r.ascans_in_disk);
  }
}

TEST(Volume, MismatchedSlicesRejected) {
  std::vector<BinaryMask> stack{BinaryMask(8, 8), BinaryMask(8, 9)};
  EXPECT_THROW(volume_and_thickness(stack, EtdrsGrid{}), ShapeMismatch);
  EXPECT_THROW(sector_counts({BinaryMask(8, 8)}, {}, EtdrsGrid{}), ShapeMismatch);
}

TEST(SectorCounts, PooledOverVolume) {
  const EtdrsGrid g = scaled_grid(9, 32, 64);
  const auto ref = band_stack(9, 32, 64, 10, 4);
  const auto pred = band_stack(9, 32, 64, 11, 4);
  const auto counts = sector_counts(pred, ref, g);
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& c : counts) {
    tp += c.tp, fp += c.fp, fn += c.fn;
    if (c.tp + c.fp + c.fn) {
      EXPECT_EQ(c.tp, 3 * c.fp);  // 3 overlapping rows, one extra on each side
      EXPECT_EQ(c.fp, c.fn);
    }
  }
  const auto r = volume_and_thickness(ref, g);
  EXPECT_EQ(tp + fn, r.voxels_in_disk);
  EXPECT_EQ(tp + fp + fn, r.ascans_in_disk * 5);
}

TEST(Report, CsvAndTable) {
  EvalReport rep;
  rep.image_names = {"a", "b"};
  rep.per_image = {{1.0, 0.5, 2.0 / 3.0}, {0.5, 0.5, 0.5}};
  rep.aggregate = {0.75, 0.5, 0.58};
  rep.volumes = 1;
  rep.predicted_volume_mm3 = 0.71;
  rep.reference_volume_mm3 = 0.7;
  rep.predicted_thickness_um = 25.36;
  std::ostringstream csv;
  write_eval_csv(csv, rep);
  std::istringstream in(csv.str());
  std::string line;
  int lines = 0, sectors = 0;
  std::getline(in, line);
  EXPECT_EQ(line, "scope,name,precision,recall,f_score,volume_mm3,thickness_um");
  while (std::getline(in, line)) {
    ++lines;
    if (line.rfind("sector,", 0) == 0) ++sectors;
  }
  EXPECT_EQ(lines, 2 + 2 + 9);
  EXPECT_EQ(sectors, 9);
  std::ostringstream table;
  write_eval_table(table, rep);
  EXPECT_NE(table.str().find("outer_temporal"), std::string::npos);
  EXPECT_NE(table.str().find("25.36"), std::string::npos);
}
