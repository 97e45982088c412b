#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fouriernet/mask.hpp"
#include "fouriernet/pgm.hpp"

namespace fouriernet {

enum class Split { Train, Validation, Test };

std::string to_string(Split split);
Split parse_split(const std::string& name);  // throws FormatError

struct SynthConfig {
  std::uint64_t seed = 1;
  int groups = 30;            // "eyes"
  int images_per_group = 49;  // B-scans per eye
  int height = 64;
  int width = 128;
  double noise = 0.3;  // speckle standard deviation; 0 disables noise
  int divisor = 8;     // height and width must be multiples of this

  void validate() const;  // throws InvalidDims
};

// Everything needed to regenerate one sample, and to audit the generator.
struct SynthParams {
  int group = 0;
  int slice = 0;
  Split split = Split::Train;
  std::array<double, 4> center_coeffs{};  // rows / height, cubic in u = (x - W/2) / (W/2)
  double base_thickness = 0.0;            // pixels
  double dip_depth = 0.0;                 // fraction of base thickness removed at the fovea
  double dip_sigma = 0.0;                 // pixels
  double fovea_col = 0.0;
  double slice_weight = 0.0;  // dip attenuation from distance to the central slice
  int first_col = 0;
  int last_col = 0;
  double noise = 0.0;
  std::uint64_t noise_seed = 0;
};

struct SyntheticSample {
  GrayImage image;
  BinaryMask mask;
  SynthParams params;
  std::vector<int> band_top;     // per column, -1 where the band is absent
  std::vector<int> band_bottom;  // inclusive
};

// (train, validation, test) group counts for the 15:5:10 ratio; each >= 1.
std::array<int, 3> split_group_counts(int groups);

Split split_of_group(int group, int groups);

SyntheticSample generate_sample(const SynthConfig& config, int group, int slice);

// Samples in group-major order.
std::vector<SyntheticSample> generate_dataset(const SynthConfig& config);

// One JSON object (single line) per params record.
std::string params_to_json(const SynthParams& params);

std::string sample_stem(int group, int slice);  // g007_s12

// Writes images/<stem>.pgm, masks/<stem>.pgm and dataset.jsonl under `dir`.
void write_dataset(const std::filesystem::path& dir, const std::vector<SyntheticSample>& samples);

struct DatasetEntry {
  SynthParams params;
  std::filesystem::path image_path;
  std::filesystem::path mask_path;
};

std::vector<DatasetEntry> read_dataset_manifest(const std::filesystem::path& dir);

}  // namespace fouriernet
