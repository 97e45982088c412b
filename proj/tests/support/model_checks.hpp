#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fouriernet/model.hpp"
#include "gradcheck.hpp"

namespace fouriernet::fixtures {

// Random image, descriptor targets and one-hot labels sized for `config`.
template <typename T>
struct ToyBatch {
  ad::Tensor<T> image;
  std::vector<ad::Tensor<T>> descriptors;
  ad::Tensor<T> labels;
};

template <typename T>
ToyBatch<T> toy_batch(const NetworkConfig& config, std::uint64_t seed);

// Central-difference check of the joint loss (dropout off) with respect to up
// to `entries` evenly spaced entries of each named parameter. Everything runs
// in double.
GradCheckResult joint_loss_gradcheck(const NetworkConfig& config, std::uint64_t seed,
                                     const std::vector<std::string>& names, std::size_t entries, double h = 1e-3);

// Same, but the analytic gradient comes from the float model while the
// differences are taken on a double copy of the same float weights.
GradCheckResult joint_loss_gradcheck_float(const NetworkConfig& config, std::uint64_t seed,
                                           const std::vector<std::string>& names, std::size_t entries,
                                           double h = 1e-3);

}  // namespace fouriernet::fixtures
