#include "fouriernet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include <json.hpp>

#include "fouriernet/error.hpp"

namespace fouriernet {

std::string to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Validation: return "val";
    case Split::Test: return "test";
  }
  return "train";
}

Split parse_split(const std::string& name) {
  if (name == "train") return Split::Train;
  if (name == "val") return Split::Validation;
  if (name == "test") return Split::Test;
  throw FormatError("unknown split '" + name + "'");
}

void SynthConfig::validate() const {
  if (groups < 3) throw InvalidDims("need at least 3 groups, got " + std::to_string(groups));
  if (images_per_group < 1) throw InvalidDims("images_per_group must be >= 1");
  if (divisor < 1) throw InvalidDims("divisor must be >= 1");
  if (height < 32 || width < 32) throw InvalidDims("images must be at least 32x32");
  if (height % divisor || width % divisor) {
    throw InvalidDims(std::to_string(height) + "x" + std::to_string(width) + " is not divisible by " +
                      std::to_string(divisor));
  }
  if (noise < 0.0) throw InvalidDims("noise must be >= 0");
}

std::array<int, 3> split_group_counts(int groups) {
  const int val = std::max(1, static_cast<int>(std::lround(groups * 5.0 / 30.0)));
  const int test = std::max(1, static_cast<int>(std::lround(groups * 10.0 / 30.0)));
  return {groups - val - test, val, test};
}

Split split_of_group(int group, int groups) {
  const auto counts = split_group_counts(groups);
  if (group < counts[0]) return Split::Train;
  if (group < counts[0] + counts[1]) return Split::Validation;
  return Split::Test;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Intensities of the layered background, top to bottom.
constexpr float kVitreous = 0.08f;
constexpr float kBand = 0.70f;
constexpr float kBelowBand = 0.25f;
constexpr float kPigmentLine = 0.85f;
constexpr float kChoroid = 0.30f;

}  // namespace

SyntheticSample generate_sample(const SynthConfig& config, int group, int slice) {
  config.validate();
  if (group < 0 || group >= config.groups || slice < 0 || slice >= config.images_per_group) {
    throw InvalidDims("sample index out of range");
  }
  const int h = config.height, w = config.width;
  SyntheticSample s;
  SynthParams& p = s.params;
  p.group = group;
  p.slice = slice;
  p.split = split_of_group(group, config.groups);
  p.noise = config.noise;

  // Eye-level shape, shared by all slices of a group.
  std::mt19937_64 eye(stream_seed(config.seed, static_cast<std::uint64_t>(group), ~0ULL));
  const std::array<double, 4> eye_coeffs{uniform(eye, 0.42, 0.55), uniform(eye, -0.06, 0.06),
                                         uniform(eye, -0.08, 0.08), uniform(eye, -0.04, 0.04)};
  const double thickness_frac = uniform(eye, 0.10, 0.16);
  const double eye_dip = uniform(eye, 0.35, 0.65);
  const double eye_sigma = uniform(eye, 0.06, 0.12);
  const double eye_fovea = uniform(eye, 0.42, 0.58);
  const double inner_frac = uniform(eye, 0.10, 0.16);

  std::mt19937_64 rng(stream_seed(config.seed, static_cast<std::uint64_t>(group), static_cast<std::uint64_t>(slice)));
  for (std::size_t k = 0; k < 4; ++k) p.center_coeffs[k] = eye_coeffs[k] + uniform(rng, -0.01, 0.01);
  p.base_thickness = std::clamp(thickness_frac * h * uniform(rng, 0.95, 1.05), 4.0, 20.0);
  p.dip_depth = eye_dip;
  p.dip_sigma = eye_sigma * w;
  p.fovea_col = eye_fovea * w;
  const double central = 0.5 * (config.images_per_group - 1);
  const double spread = std::max(1.0, config.images_per_group / 5.0);
  p.slice_weight = std::exp(-0.5 * std::pow((slice - central) / spread, 2));
  p.first_col = static_cast<int>(std::floor(uniform(rng, 0.0, 0.04) * w));
  p.last_col = w - 1 - static_cast<int>(std::floor(uniform(rng, 0.0, 0.04) * w));
  p.noise_seed = rng();

  // Per-column band interval, forced 8-connected across neighbouring columns.
  s.band_top.assign(w, -1);
  s.band_bottom.assign(w, -1);
  const int margin_top = 2 + static_cast<int>(inner_frac * h) + 1;
  for (int x = p.first_col; x <= p.last_col; ++x) {
    const double u = (x - 0.5 * w) / (0.5 * w);
    const double dip = p.dip_depth * p.slice_weight * std::exp(-0.5 * std::pow((x - p.fovea_col) / p.dip_sigma, 2));
    const double center =
        h * (p.center_coeffs[0] + u * (p.center_coeffs[1] + u * (p.center_coeffs[2] + u * p.center_coeffs[3])));
    const int thickness = std::clamp(static_cast<int>(std::lround(p.base_thickness * (1.0 - dip))), 2, 24);
    int top = std::clamp(static_cast<int>(std::lround(center - 0.5 * thickness)), margin_top, h - thickness - 8);
    if (x > p.first_col) top = std::clamp(top, s.band_top[x - 1] - thickness, s.band_bottom[x - 1] + 1);
    s.band_top[x] = top;
    s.band_bottom[x] = top + thickness - 1;
  }

  std::vector<std::uint8_t> mask(static_cast<std::size_t>(h) * w, 0);
  s.image.height = h;
  s.image.width = w;
  s.image.data.assign(static_cast<std::size_t>(h) * w, kVitreous);
  const double default_center = h * p.center_coeffs[0];
  for (int x = 0; x < w; ++x) {
    const bool has_band = s.band_top[x] >= 0;
    const int top = has_band ? s.band_top[x] : static_cast<int>(default_center) - 2;
    const int bottom = has_band ? s.band_bottom[x] : top + 3;
    const int surface = std::max(1, top - static_cast<int>(inner_frac * h));
    const int pigment = std::min(h - 3, bottom + 4);
    for (int r = 0; r < h; ++r) {
      float v = kVitreous;
      if (r >= surface && r < top) {
        // Inner retina brightens slightly toward the band.
        v = 0.35f + 0.10f * static_cast<float>(r - surface) / static_cast<float>(std::max(1, top - surface));
      } else if (r >= top && r <= bottom) {
        v = has_band ? kBand : kBelowBand;
      } else if (r > bottom && r < pigment) {
        v = kBelowBand;
      } else if (r >= pigment && r < pigment + 2) {
        v = kPigmentLine;
      } else if (r >= pigment + 2) {
        v = kChoroid;
      }
      s.image.data[static_cast<std::size_t>(r) * w + x] = v;
      if (has_band && r >= top && r <= bottom) mask[static_cast<std::size_t>(r) * w + x] = 1;
    }
  }
  s.mask = BinaryMask(h, w, std::move(mask));

  if (config.noise > 0.0) {
    // Multiplicative speckle: Gamma(k, 1/k) has mean 1 and std 1/sqrt(k).
    const double k = 1.0 / (config.noise * config.noise);
    std::mt19937_64 noise_rng(p.noise_seed);
    std::gamma_distribution<double> speckle(k, 1.0 / k);
    for (auto& v : s.image.data) v = static_cast<float>(std::clamp(v * speckle(noise_rng), 0.0, 1.0));
  }
  return s;
}

std::vector<SyntheticSample> generate_dataset(const SynthConfig& config) {
  config.validate();
  std::vector<SyntheticSample> out;
  out.reserve(static_cast<std::size_t>(config.groups) * config.images_per_group);
  for (int g = 0; g < config.groups; ++g)
    for (int s = 0; s < config.images_per_group; ++s) out.push_back(generate_sample(config, g, s));
  return out;
}

std::string params_to_json(const SynthParams& p) {
  nlohmann::ordered_json j;
  j["stem"] = sample_stem(p.group, p.slice);
  j["group"] = p.group;
  j["slice"] = p.slice;
  j["split"] = to_string(p.split);
  j["center_coeffs"] = p.center_coeffs;
  j["base_thickness"] = p.base_thickness;
  j["dip_depth"] = p.dip_depth;
  j["dip_sigma"] = p.dip_sigma;
  j["fovea_col"] = p.fovea_col;
  j["slice_weight"] = p.slice_weight;
  j["first_col"] = p.first_col;
  j["last_col"] = p.last_col;
  j["noise"] = p.noise;
  j["noise_seed"] = p.noise_seed;
  return j.dump();
}

std::string sample_stem(int group, int slice) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "g%03d_s%02d", group, slice);
  return buf;
}

void write_dataset(const std::filesystem::path& dir, const std::vector<SyntheticSample>& samples) {
  std::filesystem::create_directories(dir / "images");
  std::filesystem::create_directories(dir / "masks");
  std::ofstream manifest(dir / "dataset.jsonl");
  if (!manifest) throw FormatError("cannot write " + (dir / "dataset.jsonl").string());
  for (const auto& s : samples) {
    const std::string stem = sample_stem(s.params.group, s.params.slice);
    write_image_pgm(dir / "images" / (stem + ".pgm"), s.image);
    write_mask_pgm(dir / "masks" / (stem + ".pgm"), s.mask);
    manifest << params_to_json(s.params) << '\n';
  }
  if (!manifest) throw FormatError("failed writing dataset manifest");
}

std::vector<DatasetEntry> read_dataset_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / "dataset.jsonl");
  if (!in) throw FormatError("no dataset.jsonl in " + dir.string());
  std::vector<DatasetEntry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      DatasetEntry e;
      auto& p = e.params;
      p.group = j.at("group").get<int>();
      p.slice = j.at("slice").get<int>();
      p.split = parse_split(j.at("split").get<std::string>());
      p.center_coeffs = j.at("center_coeffs").get<std::array<double, 4>>();
      p.base_thickness = j.at("base_thickness").get<double>();
      p.dip_depth = j.at("dip_depth").get<double>();
      p.dip_sigma = j.at("dip_sigma").get<double>();
      p.fovea_col = j.at("fovea_col").get<double>();
      p.slice_weight = j.at("slice_weight").get<double>();
      p.first_col = j.at("first_col").get<int>();
      p.last_col = j.at("last_col").get<int>();
      p.noise = j.at("noise").get<double>();
      p.noise_seed = j.at("noise_seed").get<std::uint64_t>();
      const std::string stem = j.at("stem").get<std::string>();
      e.image_path = dir / "images" / (stem + ".pgm");
      e.mask_path = dir / "masks" / (stem + ".pgm");
      entries.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw FormatError("dataset.jsonl line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return entries;
}

}  // namespace fouriernet
