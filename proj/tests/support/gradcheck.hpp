#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "fouriernet/tensor.hpp"

namespace fouriernet::fixtures {

// Central-difference comparison of analytic gradients. `loss` rebuilds the
// graph from the current input values and returns a one-element tensor.
// Error per entry is |analytic - numeric| / max(1, |analytic|, |numeric|).
struct GradCheckResult {
  double max_error = 0.0;
  std::size_t checked = 0;
};

inline GradCheckResult check_gradients(const std::function<ad::Tensor<double>()>& loss,
                                       std::vector<ad::Tensor<double>> inputs, double h = 1e-3) {
  for (auto& t : inputs) t.zero_grad();
  ad::backward(loss());
  GradCheckResult result;
  for (auto& t : inputs) {
    std::vector<double> analytic(t.grad().begin(), t.grad().end());
    if (analytic.empty()) analytic.assign(t.numel(), 0.0);
    auto values = t.mutable_data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + h;
      double up;
      {
        ad::NoGradGuard guard;
        up = loss().item();
      }
      values[i] = saved - h;
      double down;
      {
        ad::NoGradGuard guard;
        down = loss().item();
      }
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double denom = std::max({1.0, std::abs(analytic[i]), std::abs(numeric)});
      result.max_error = std::max(result.max_error, std::abs(analytic[i] - numeric) / denom);
      ++result.checked;
    }
  }
  return result;
}

inline ad::Tensor<double> random_tensor(ad::Shape shape, std::mt19937_64& rng, double lo = -1.0,
                                        double hi = 1.0, bool requires_grad = true) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(ad::element_count(shape));
  for (auto& x : v) x = dist(rng);
  return ad::Tensor<double>(std::move(shape), std::move(v), requires_grad);
}

}  // namespace fouriernet::fixtures
