#pragma once

#include <array>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "fouriernet/evaluation.hpp"
#include "fouriernet/kv_config.hpp"
#include "fouriernet/mask.hpp"

namespace fouriernet {

enum class EyeSide { Left, Right };

enum class Sector {
  Central,
  InnerSuperior,
  InnerNasal,
  InnerInferior,
  InnerTemporal,
  OuterSuperior,
  OuterNasal,
  OuterInferior,
  OuterTemporal,
  Outside,
};

inline constexpr std::size_t kSectorCount = 9;  // excluding Outside

std::string sector_name(Sector sector);

// En-face ETDRS grid. Rows index B-scans (slices), columns index A-scans.
// Diameters are fixed at 1, 3 and 6 mm.
struct EtdrsGrid {
  double center_bscan = 0.0;
  double center_ascan = 0.0;
  double lateral_mm_per_ascan = 0.011;
  double slice_spacing_mm = 0.125;
  double axial_mm_per_pixel = 0.0039;
  EyeSide eye = EyeSide::Right;

  void validate() const;  // throws ConfigError

  // Centre at the central B-scan and central A-scan of the volume.
  static EtdrsGrid centered(int slices, int width);

  // Keys: center_bscan, center_ascan, lateral_mm_per_ascan, slice_spacing_mm,
  // axial_mm_per_pixel, eye (left|right). Missing keys keep `base` values.
  static EtdrsGrid from_config(const KvConfig& config, EtdrsGrid base);
};

// Default scales adapted to a smaller image: lateral and axial spacing grow so
// the image still covers the physical extent of a 512 x 256 scan.
EtdrsGrid scaled_grid(int slices, int height, int width);

// dx_mm > 0 toward larger A-scan columns, dy_mm > 0 toward smaller B-scan
// indices (superior). Boundary radii belong to the outer region; boundary
// diagonals belong to the counterclockwise-following quadrant.
Sector sector_at(double dx_mm, double dy_mm, EyeSide eye);

Sector sector_of(const EtdrsGrid& grid, double bscan, double ascan);

// Exact area of a sector in mm^2.
double sector_area(Sector sector);

struct VolumeReport {
  double total_volume_mm3 = 0.0;
  double average_thickness_um = 0.0;
  std::size_t ascans_in_disk = 0;
  std::size_t voxels_in_disk = 0;
  std::array<double, kSectorCount> sector_volume_mm3{};
  std::array<std::size_t, kSectorCount> sector_ascans{};
};

// Thickness per A-scan = foreground count x axial scale. Volume and mean
// thickness cover the A-scans inside the 6 mm disk. Throws ShapeMismatch.
VolumeReport volume_and_thickness(const std::vector<BinaryMask>& stack, const EtdrsGrid& grid);

// Voxel counts pooled per sector over a whole volume.
std::array<PixelCounts, kSectorCount> sector_counts(const std::vector<BinaryMask>& predicted,
                                                    const std::vector<BinaryMask>& reference,
                                                    const EtdrsGrid& grid);

struct EvalReport {
  std::vector<std::string> image_names;
  std::vector<PixelMetrics> per_image;
  PixelMetrics aggregate;
  std::array<double, kSectorCount> sector_f_score{};  // from counts pooled over all volumes
  std::size_t volumes = 0;
  // Means over volumes.
  double predicted_volume_mm3 = 0.0;
  double predicted_thickness_um = 0.0;
  double reference_volume_mm3 = 0.0;
  double reference_thickness_um = 0.0;
};

// CSV: one row per image, an aggregate row, then one row per sector.
void write_eval_csv(std::ostream& out, const EvalReport& report);
void write_eval_table(std::ostream& out, const EvalReport& report);

}  // namespace fouriernet
