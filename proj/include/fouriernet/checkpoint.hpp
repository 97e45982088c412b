#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fouriernet/tensor.hpp"

namespace fouriernet {

struct NamedTensor {
  std::string name;
  ad::Shape shape;
  std::vector<float> data;
};

// "FNCK", u32 count, then per tensor: u32 name length, name bytes, u32 rank,
// u32 dims, float32 data. Everything little-endian.
void write_checkpoint(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path);

}  // namespace fouriernet
