#pragma once

#include <span>
#include <vector>

#include "fouriernet/tensor.hpp"

namespace fouriernet::ad {

struct AdaDeltaState {
  double rho = 0.95;
  double epsilon = 1e-6;
  std::vector<std::vector<double>> mean_sq_grad;    // E[g^2] per parameter
  std::vector<std::vector<double>> mean_sq_update;  // E[dx^2] per parameter
};

// Fresh state (all accumulators exactly 0) shaped like `params`.
template <typename T>
AdaDeltaState make_adadelta_state(const std::vector<Tensor<T>>& params, double rho = 0.95,
                                  double epsilon = 1e-6);

// One AdaDelta update of a single flat parameter buffer; slot indexes the
// accumulators. Throws ShapeMismatch if the sizes disagree.
template <typename T>
void adadelta_step(std::span<T> param, std::span<const T> grad, AdaDeltaState& state, std::size_t slot);

// Updates every parameter from its accumulated gradient (missing gradients
// count as zero).
template <typename T>
void adadelta_step(std::vector<Tensor<T>>& params, AdaDeltaState& state);

}  // namespace fouriernet::ad
