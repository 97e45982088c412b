#include "fouriernet/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <fstream>

#include "fouriernet/error.hpp"

namespace fouriernet {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                              static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  if (!in) throw FormatError("truncated checkpoint");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

// Guards against absurd allocations when reading a corrupt file.
constexpr std::uint32_t kMaxNameLength = 4096;
constexpr std::uint32_t kMaxRank = 8;

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write("FNCK", 4);
  put_u32(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    if (ad::element_count(t.shape) != t.data.size()) {
      throw ShapeMismatch("checkpoint tensor " + t.name + " has inconsistent shape");
    }
    put_u32(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) put_u32(out, static_cast<std::uint32_t>(d));
    for (float v : t.data) put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  if (!out) throw FormatError("failed writing " + path.string());
}

std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "FNCK") throw FormatError(path.string() + " is not an FNCK checkpoint");
  const auto count = get_u32(in);
  std::vector<NamedTensor> tensors;
  for (std::uint32_t k = 0; k < count; ++k) {
    NamedTensor t;
    const auto len = get_u32(in);
    if (len > kMaxNameLength) throw FormatError("checkpoint tensor name too long");
    t.name.resize(len);
    in.read(t.name.data(), len);
    const auto rank = get_u32(in);
    if (!in || rank > kMaxRank) throw FormatError("bad checkpoint tensor header");
    for (std::uint32_t r = 0; r < rank; ++r) t.shape.push_back(get_u32(in));
    t.data.resize(ad::element_count(t.shape));
    for (auto& v : t.data) v = std::bit_cast<float>(get_u32(in));
    tensors.push_back(std::move(t));
  }
  return tensors;
}

}  // namespace fouriernet
