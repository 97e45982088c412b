#include "fouriernet/descriptor_map.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <climits>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>

#include "fouriernet/contour.hpp"
#include "fouriernet/error.hpp"
#include "fouriernet/fourier.hpp"
#include "fouriernet/pgm.hpp"

namespace fouriernet {

DescriptorMap::DescriptorMap(int height, int width, int order)
    : height_(height), width_(width), order_(order) {
  if (height < 0 || width < 0 || order < 0) throw InvalidDims("negative descriptor map dimension");
  data_.assign(static_cast<std::size_t>(height) * width * order, 0.0f);
}

std::vector<float> DescriptorMap::channel(int channel) const {
  std::vector<float> plane(static_cast<std::size_t>(height_) * width_);
  for (int r = 0; r < height_; ++r)
    for (int c = 0; c < width_; ++c) plane[static_cast<std::size_t>(r) * width_ + c] = at(r, c, channel);
  return plane;
}

namespace {

struct Branch {
  int row0 = 0;
  int col0 = 0;
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> member;
  std::optional<std::vector<double>> last;  // amplitudes of the latest ring
  int depth = 0;
};

// Crops component `label` of a labeling over `parent` into its own branch.
Branch crop(const Labeling& labeling, int label, int row0, int col0) {
  int rmin = INT_MAX, rmax = -1, cmin = INT_MAX, cmax = -1;
  for (int r = 0; r < labeling.height; ++r) {
    for (int c = 0; c < labeling.width; ++c) {
      if (labeling.at(r, c) != label) continue;
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
      cmin = std::min(cmin, c);
      cmax = std::max(cmax, c);
    }
  }
  Branch b;
  b.row0 = row0 + rmin;
  b.col0 = col0 + cmin;
  b.height = rmax - rmin + 1;
  b.width = cmax - cmin + 1;
  b.member.assign(static_cast<std::size_t>(b.height) * b.width, 0);
  for (int r = 0; r < b.height; ++r)
    for (int c = 0; c < b.width; ++c)
      b.member[static_cast<std::size_t>(r) * b.width + c] = labeling.at(rmin + r, cmin + c) == label;
  return b;
}

void assign(DescriptorMap& map, int row, int col, const std::vector<double>* amplitudes) {
  for (int n = 0; n < map.order(); ++n) {
    map.at(row, col, n) = amplitudes ? static_cast<float>((*amplitudes)[n]) : 0.0f;
  }
}

// Peels one top-level component; returns the deepest ring count of any branch.
int peel(Branch root, int order, DescriptorMap& map) {
  int max_depth = 0;
  std::vector<Branch> stack;
  stack.push_back(std::move(root));
  while (!stack.empty()) {
    Branch b = std::move(stack.back());
    stack.pop_back();
    for (;;) {
      std::optional<Contour> contour;
      try {
        contour = trace_region(b.height, b.width, b.member, b.row0, b.col0);
      } catch (const DegenerateRegion&) {
        const std::vector<double>* inherited = b.last ? &*b.last : nullptr;
        for (int r = 0; r < b.height; ++r)
          for (int c = 0; c < b.width; ++c)
            if (b.member[static_cast<std::size_t>(r) * b.width + c])
              assign(map, b.row0 + r, b.col0 + c, inherited);
        break;
      }
      ++b.depth;
      max_depth = std::max(max_depth, b.depth);
      b.last = descriptor_set(*contour, order).amplitudes;
      for (const auto& p : contour->points()) {
        assign(map, p.row, p.col, &*b.last);
        b.member[static_cast<std::size_t>(p.row - b.row0) * b.width + (p.col - b.col0)] = 0;
      }
      const Labeling rest = detail::label_grid(b.height, b.width, b.member, Connectivity::Eight);
      if (rest.component_count() == 0) break;
      if (rest.component_count() == 1) continue;
      // Split: recurse per piece, largest first.
      for (int label = static_cast<int>(rest.component_count()) - 1; label >= 0; --label) {
        Branch child = crop(rest, label, b.row0, b.col0);
        child.last = b.last;
        child.depth = b.depth;
        stack.push_back(std::move(child));
      }
      break;
    }
  }
  return max_depth;
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> bytes{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                  static_cast<char>((v >> 16) & 0xff),
                                  static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes.data(), 4);
}

std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  if (!in) throw FormatError("truncated FDM file");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

DescriptorMap generate_descriptor_maps(const BinaryMask& mask, int order) {
  return generate_descriptor_maps(mask, order, nullptr);
}

DescriptorMap generate_descriptor_maps(const BinaryMask& mask, int order,
                                       std::vector<int>* iterations_per_component) {
  if (order < 1) throw InvalidHarmonic("descriptor order must be >= 1");
  DescriptorMap map(mask.height(), mask.width(), order);
  const Labeling labeling = connected_components(mask, Connectivity::Eight);
  if (iterations_per_component) iterations_per_component->clear();
  for (int label = 0; label < static_cast<int>(labeling.component_count()); ++label) {
    const int depth = peel(crop(labeling, label, 0, 0), order, map);
    if (iterations_per_component) iterations_per_component->push_back(depth);
  }
  return map;
}

double map_error(const DescriptorMap& predicted, const DescriptorMap& target) {
  if (predicted.height() != target.height() || predicted.width() != target.width() ||
      predicted.order() != target.order()) {
    throw ShapeMismatch("descriptor maps differ in shape");
  }
  const auto& p = predicted.data();
  const auto& t = target.data();
  if (p.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = static_cast<double>(p[i]) - static_cast<double>(t[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(p.size());
}

void write_fdm(const std::filesystem::path& path, const DescriptorMap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write("FDM1", 4);
  put_u32(out, static_cast<std::uint32_t>(map.height()));
  put_u32(out, static_cast<std::uint32_t>(map.width()));
  put_u32(out, static_cast<std::uint32_t>(map.order()));
  for (float v : map.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  if (!out) throw FormatError("failed writing " + path.string());
}

DescriptorMap read_fdm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "FDM1") throw FormatError(path.string() + " is not an FDM1 file");
  const auto h = get_u32(in);
  const auto w = get_u32(in);
  const auto n = get_u32(in);
  DescriptorMap map(static_cast<int>(h), static_cast<int>(w), static_cast<int>(n));
  for (auto& v : map.data()) v = std::bit_cast<float>(get_u32(in));
  return map;
}

void write_channel_pgms(const std::filesystem::path& directory, const std::string& stem,
                        const DescriptorMap& map) {
  std::filesystem::create_directories(directory);
  for (int n = 0; n < map.order(); ++n) {
    const auto plane = map.channel(n);
    float lo = 0.0f, hi = 0.0f;
    if (!plane.empty()) {
      const auto [mn, mx] = std::minmax_element(plane.begin(), plane.end());
      lo = *mn;
      hi = *mx;
    }
    std::vector<std::uint8_t> samples(plane.size(), 0);
    if (hi > lo) {
      for (std::size_t i = 0; i < plane.size(); ++i) {
        samples[i] = static_cast<std::uint8_t>(std::lround((plane[i] - lo) / (hi - lo) * 255.0f));
      }
    }
    write_pgm(directory / (stem + "_n" + std::to_string(n + 1) + ".pgm"), map.height(),
              map.width(), samples);
  }
}

}  // namespace fouriernet
