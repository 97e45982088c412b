#include "fouriernet/etdrs.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "fouriernet/error.hpp"

namespace fouriernet {

std::string sector_name(Sector sector) {
  switch (sector) {
    case Sector::Central: return "central";
    case Sector::InnerSuperior: return "inner_superior";
    case Sector::InnerNasal: return "inner_nasal";
    case Sector::InnerInferior: return "inner_inferior";
    case Sector::InnerTemporal: return "inner_temporal";
    case Sector::OuterSuperior: return "outer_superior";
    case Sector::OuterNasal: return "outer_nasal";
    case Sector::OuterInferior: return "outer_inferior";
    case Sector::OuterTemporal: return "outer_temporal";
    case Sector::Outside: return "outside";
  }
  return "outside";
}

void EtdrsGrid::validate() const {
  if (!(lateral_mm_per_ascan > 0.0) || !(slice_spacing_mm > 0.0) || !(axial_mm_per_pixel > 0.0)) {
    throw ConfigError("grid scales must be positive");
  }
}

EtdrsGrid EtdrsGrid::centered(int slices, int width) {
  EtdrsGrid g;
  g.center_bscan = 0.5 * (slices - 1);
  g.center_ascan = 0.5 * (width - 1);
  return g;
}

EtdrsGrid EtdrsGrid::from_config(const KvConfig& config, EtdrsGrid base) {
  config.require_known({"center_bscan", "center_ascan", "lateral_mm_per_ascan", "slice_spacing_mm",
                        "axial_mm_per_pixel", "eye"});
  EtdrsGrid g = base;
  g.center_bscan = config.get_double("center_bscan", g.center_bscan);
  g.center_ascan = config.get_double("center_ascan", g.center_ascan);
  g.lateral_mm_per_ascan = config.get_double("lateral_mm_per_ascan", g.lateral_mm_per_ascan);
  g.slice_spacing_mm = config.get_double("slice_spacing_mm", g.slice_spacing_mm);
  g.axial_mm_per_pixel = config.get_double("axial_mm_per_pixel", g.axial_mm_per_pixel);
  if (config.has("eye")) {
    const auto& eye = config.get("eye");
    if (eye == "left") {
      g.eye = EyeSide::Left;
    } else if (eye == "right") {
      g.eye = EyeSide::Right;
    } else {
      throw ConfigError("eye must be left or right, got " + eye);
    }
  }
  g.validate();
  return g;
}

EtdrsGrid scaled_grid(int slices, int height, int width) {
  EtdrsGrid g = EtdrsGrid::centered(slices, width);
  g.lateral_mm_per_ascan = 0.011 * 512.0 / width;
  g.axial_mm_per_pixel = 0.0039 * 256.0 / height;
  return g;
}

Sector sector_at(double dx, double dy, EyeSide eye) {
  const double r2 = dx * dx + dy * dy;
  if (r2 < 0.25) return Sector::Central;
  if (r2 >= 9.0) return Sector::Outside;
  const bool inner = r2 < 2.25;
  enum { Up, Left, Down, Right } quadrant;
  if (dy > 0 && dx <= dy && dx > -dy) {
    quadrant = Up;
  } else if (dx < 0 && dy <= -dx && dy > dx) {
    quadrant = Left;
  } else if (dy < 0 && dx >= dy && dx < -dy) {
    quadrant = Down;
  } else {
    quadrant = Right;
  }
  // Right eye: the nose lies toward larger columns; mirrored for the left eye.
  const bool right_is_nasal = eye == EyeSide::Right;
  switch (quadrant) {
    case Up: return inner ? Sector::InnerSuperior : Sector::OuterSuperior;
    case Down: return inner ? Sector::InnerInferior : Sector::OuterInferior;
    case Right:
      return right_is_nasal ? (inner ? Sector::InnerNasal : Sector::OuterNasal)
                            : (inner ? Sector::InnerTemporal : Sector::OuterTemporal);
    case Left:
      return right_is_nasal ? (inner ? Sector::InnerTemporal : Sector::OuterTemporal)
                            : (inner ? Sector::InnerNasal : Sector::OuterNasal);
  }
  return Sector::Outside;
}

Sector sector_of(const EtdrsGrid& grid, double bscan, double ascan) {
  const double dx = (ascan - grid.center_ascan) * grid.lateral_mm_per_ascan;
  const double dy = (grid.center_bscan - bscan) * grid.slice_spacing_mm;
  return sector_at(dx, dy, grid.eye);
}

double sector_area(Sector sector) {
  const double pi = std::numbers::pi;
  switch (sector) {
    case Sector::Central: return pi * 0.25;
    case Sector::InnerSuperior:
    case Sector::InnerNasal:
    case Sector::InnerInferior:
    case Sector::InnerTemporal: return pi * (2.25 - 0.25) / 4.0;
    case Sector::OuterSuperior:
    case Sector::OuterNasal:
    case Sector::OuterInferior:
    case Sector::OuterTemporal: return pi * (9.0 - 2.25) / 4.0;
    case Sector::Outside: return 0.0;
  }
  return 0.0;
}

namespace {

void check_stack(const std::vector<BinaryMask>& stack) {
  for (const auto& m : stack) {
    if (m.height() != stack.front().height() || m.width() != stack.front().width()) {
      throw ShapeMismatch("B-scans in a volume must share dimensions");
    }
  }
}

}  // namespace

VolumeReport volume_and_thickness(const std::vector<BinaryMask>& stack, const EtdrsGrid& grid) {
  grid.validate();
  check_stack(stack);
  VolumeReport report;
  std::array<std::size_t, kSectorCount> sector_voxels{};
  for (std::size_t b = 0; b < stack.size(); ++b) {
    const auto& m = stack[b];
    for (int c = 0; c < m.width(); ++c) {
      const Sector s = sector_of(grid, static_cast<double>(b), c);
      if (s == Sector::Outside) continue;
      std::size_t count = 0;
      for (int r = 0; r < m.height(); ++r) count += m.at(r, c);
      ++report.ascans_in_disk;
      report.voxels_in_disk += count;
      ++report.sector_ascans[static_cast<std::size_t>(s)];
      sector_voxels[static_cast<std::size_t>(s)] += count;
    }
  }
  const double voxel_mm3 = grid.axial_mm_per_pixel * grid.lateral_mm_per_ascan * grid.slice_spacing_mm;
  report.total_volume_mm3 = static_cast<double>(report.voxels_in_disk) * voxel_mm3;
  for (std::size_t k = 0; k < kSectorCount; ++k) {
    report.sector_volume_mm3[k] = static_cast<double>(sector_voxels[k]) * voxel_mm3;
  }
  if (report.ascans_in_disk > 0) {
    report.average_thickness_um = static_cast<double>(report.voxels_in_disk) * grid.axial_mm_per_pixel /
                                  static_cast<double>(report.ascans_in_disk) * 1000.0;
  }
  return report;
}

std::array<PixelCounts, kSectorCount> sector_counts(const std::vector<BinaryMask>& predicted,
                                                    const std::vector<BinaryMask>& reference,
                                                    const EtdrsGrid& grid) {
  if (predicted.size() != reference.size()) throw ShapeMismatch("predicted and reference volumes differ in depth");
  check_stack(predicted);
  check_stack(reference);
  std::array<PixelCounts, kSectorCount> counts{};
  for (std::size_t b = 0; b < predicted.size(); ++b) {
    const auto& p = predicted[b];
    const auto& r = reference[b];
    if (p.height() != r.height() || p.width() != r.width()) throw ShapeMismatch("B-scan size mismatch");
    for (int c = 0; c < p.width(); ++c) {
      const Sector s = sector_of(grid, static_cast<double>(b), c);
      if (s == Sector::Outside) continue;
      auto& k = counts[static_cast<std::size_t>(s)];
      for (int row = 0; row < p.height(); ++row) {
        const bool pv = p.at(row, c), rv = r.at(row, c);
        if (pv && rv) {
          ++k.tp;
        } else if (pv) {
          ++k.fp;
        } else if (rv) {
          ++k.fn;
        }
      }
    }
  }
  return counts;
}

void write_eval_csv(std::ostream& out, const EvalReport& report) {
  char line[256];
  out << "scope,name,precision,recall,f_score,volume_mm3,thickness_um\n";
  for (std::size_t i = 0; i < report.per_image.size(); ++i) {
    const auto& m = report.per_image[i];
    std::snprintf(line, sizeof line, "image,%s,%.6f,%.6f,%.6f,,\n", report.image_names[i].c_str(), m.precision,
                  m.recall, m.f_score);
    out << line;
  }
  const auto& a = report.aggregate;
  std::snprintf(line, sizeof line, "aggregate,predicted,%.6f,%.6f,%.6f,%.6f,%.4f\n", a.precision, a.recall,
                a.f_score, report.predicted_volume_mm3, report.predicted_thickness_um);
  out << line;
  std::snprintf(line, sizeof line, "aggregate,reference,,,,%.6f,%.4f\n", report.reference_volume_mm3,
                report.reference_thickness_um);
  out << line;
  for (std::size_t k = 0; k < kSectorCount; ++k) {
    std::snprintf(line, sizeof line, "sector,%s,,,%.6f,,\n", sector_name(static_cast<Sector>(k)).c_str(),
                  report.sector_f_score[k]);
    out << line;
  }
}

void write_eval_table(std::ostream& out, const EvalReport& report) {
  char line[256];
  const auto& a = report.aggregate;
  std::snprintf(line, sizeof line, "%-12s %10s %10s %10s\n", "", "precision", "recall", "f-score");
  out << line;
  std::snprintf(line, sizeof line, "%-12s %10.2f %10.2f %10.2f\n", "mean (%)", 100 * a.precision, 100 * a.recall,
                100 * a.f_score);
  out << line << '\n';
  out << "Sector f-scores (%)\n";
  for (std::size_t k = 0; k < kSectorCount; ++k) {
    std::snprintf(line, sizeof line, "  %-16s %8.2f\n", sector_name(static_cast<Sector>(k)).c_str(),
                  100 * report.sector_f_score[k]);
    out << line;
  }
  out << '\n';
  std::snprintf(line, sizeof line, "%-12s %14s %16s\n", "", "volume (mm3)", "thickness (um)");
  out << line;
  std::snprintf(line, sizeof line, "%-12s %14.4f %16.2f\n", "predicted", report.predicted_volume_mm3,
                report.predicted_thickness_um);
  out << line;
  std::snprintf(line, sizeof line, "%-12s %14.4f %16.2f\n", "reference", report.reference_volume_mm3,
                report.reference_thickness_um);
  out << line;
  std::snprintf(line, sizeof line, "(%zu volume%s)\n", report.volumes, report.volumes == 1 ? "" : "s");
  out << line;
}

}  // namespace fouriernet
