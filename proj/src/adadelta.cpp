#include "fouriernet/adadelta.hpp"

#include <cmath>
#include <string>

#include "fouriernet/error.hpp"

namespace fouriernet::ad {

template <typename T>
AdaDeltaState make_adadelta_state(const std::vector<Tensor<T>>& params, double rho, double epsilon) {
  AdaDeltaState state;
  state.rho = rho;
  state.epsilon = epsilon;
  for (const auto& p : params) {
    state.mean_sq_grad.emplace_back(p.numel(), 0.0);
    state.mean_sq_update.emplace_back(p.numel(), 0.0);
  }
  return state;
}

template <typename T>
void adadelta_step(std::span<T> param, std::span<const T> grad, AdaDeltaState& state, std::size_t slot) {
  if (slot >= state.mean_sq_grad.size()) throw ShapeMismatch("adadelta: no accumulator slot " + std::to_string(slot));
  auto& eg = state.mean_sq_grad[slot];
  auto& ex = state.mean_sq_update[slot];
  if (eg.size() != param.size() || (!grad.empty() && grad.size() != param.size())) {
    throw ShapeMismatch("adadelta: parameter " + std::to_string(slot) + " has " + std::to_string(param.size()) +
                        " entries, state has " + std::to_string(eg.size()));
  }
  const double rho = state.rho, eps = state.epsilon;
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad.empty() ? 0.0 : static_cast<double>(grad[i]);
    eg[i] = rho * eg[i] + (1.0 - rho) * g * g;
    const double dx = -std::sqrt(ex[i] + eps) / std::sqrt(eg[i] + eps) * g;
    ex[i] = rho * ex[i] + (1.0 - rho) * dx * dx;
    param[i] = static_cast<T>(static_cast<double>(param[i]) + dx);
  }
}

template <typename T>
void adadelta_step(std::vector<Tensor<T>>& params, AdaDeltaState& state) {
  if (params.size() != state.mean_sq_grad.size()) {
    throw ShapeMismatch("adadelta: " + std::to_string(params.size()) + " parameters but state for " +
                        std::to_string(state.mean_sq_grad.size()));
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    adadelta_step<T>(params[k].mutable_data(), params[k].grad(), state, k);
  }
}

template AdaDeltaState make_adadelta_state<float>(const std::vector<Tensor<float>>&, double, double);
template AdaDeltaState make_adadelta_state<double>(const std::vector<Tensor<double>>&, double, double);
template void adadelta_step<float>(std::span<float>, std::span<const float>, AdaDeltaState&, std::size_t);
template void adadelta_step<double>(std::span<double>, std::span<const double>, AdaDeltaState&, std::size_t);
template void adadelta_step<float>(std::vector<Tensor<float>>&, AdaDeltaState&);
template void adadelta_step<double>(std::vector<Tensor<double>>&, AdaDeltaState&);

}  // namespace fouriernet::ad
