#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fouriernet/adadelta.hpp"
#include "fouriernet/error.hpp"
#include "fouriernet/ops.hpp"

using namespace fouriernet;
using namespace fouriernet::ad;

TEST(AdaDelta, FreshStateIsZero) {
  std::vector<Tensor<double>> params{Tensor<double>(Shape{3}), Tensor<double>(Shape{2, 2})};
  const auto state = make_adadelta_state(params);
  EXPECT_EQ(state.rho, 0.95);
  EXPECT_EQ(state.epsilon, 1e-6);
  ASSERT_EQ(state.mean_sq_grad.size(), 2u);
  EXPECT_EQ(state.mean_sq_grad[1], std::vector<double>(4, 0.0));
  EXPECT_EQ(state.mean_sq_update[0], std::vector<double>(3, 0.0));
}

TEST(AdaDelta, ZeroGradientLeavesParametersAndDecaysAccumulators) {
  std::vector<double> x{1.5, -2.0};
  AdaDeltaState state;
  state.mean_sq_grad = {{0.4, 0.8}};
  state.mean_sq_update = {{0.2, 0.1}};
  const std::vector<double> g{0.0, 0.0};
  adadelta_step<double>(x, g, state, 0);
  EXPECT_EQ(x, (std::vector<double>{1.5, -2.0}));
  EXPECT_DOUBLE_EQ(state.mean_sq_grad[0][0], 0.95 * 0.4);
  EXPECT_DOUBLE_EQ(state.mean_sq_grad[0][1], 0.95 * 0.8);
  EXPECT_DOUBLE_EQ(state.mean_sq_update[0][0], 0.95 * 0.2);
  EXPECT_DOUBLE_EQ(state.mean_sq_update[0][1], 0.95 * 0.1);
}

TEST(AdaDelta, FirstAndSecondStepByHand) {
  const double rho = 0.95, eps = 1e-6;
  std::vector<double> x{0.0, 0.0};
  std::vector<Tensor<double>> shape_only{Tensor<double>(Shape{2})};
  auto state = make_adadelta_state(shape_only);
  const std::vector<double> g{3.0, -0.01};
  adadelta_step<double>(x, g, state, 0);
  for (int i = 0; i < 2; ++i) {
    const double want = -std::sqrt(eps) / std::sqrt((1 - rho) * g[i] * g[i] + eps) * g[i];
    EXPECT_NEAR(x[i], want, 1e-18);
    EXPECT_LT(x[i] * g[i], 0.0);  // opposes the gradient
  }
  // Second step with the same gradient, evaluated from the recurrences.
  const std::vector<double> first = x;
  adadelta_step<double>(x, g, state, 0);
  for (int i = 0; i < 2; ++i) {
    const double eg1 = (1 - rho) * g[i] * g[i];
    const double ex1 = (1 - rho) * first[i] * first[i];
    const double eg2 = rho * eg1 + (1 - rho) * g[i] * g[i];
    const double dx2 = -std::sqrt(ex1 + eps) / std::sqrt(eg2 + eps) * g[i];
    EXPECT_NEAR(x[i], first[i] + dx2, 1e-15);
    EXPECT_GE(state.mean_sq_grad[0][i], 0.0);
    EXPECT_GE(state.mean_sq_update[0][i], 0.0);
  }
}

TEST(AdaDelta, MinimizesQuadraticMonotonically) {
  Tensor<double> x(Shape{1}, std::vector<double>{5.0}, true);
  std::vector<Tensor<double>> params{x};
  auto state = make_adadelta_state(params);
  double previous = 5.0;
  for (int step = 0; step < 200; ++step) {
    x.zero_grad();
    const Tensor<double> zero(Shape{1});
    backward(mse_loss(x, zero));  // x^2
    adadelta_step(params, state);
    const double now = std::abs(x.item());
    EXPECT_LE(now, previous);
    previous = now;
  }
  EXPECT_LT(previous, 5.0);
}

TEST(AdaDelta, SizeMismatchRejected) {
  std::vector<Tensor<double>> params{Tensor<double>(Shape{3})};
  auto state = make_adadelta_state(params);
  std::vector<double> x(3, 0.0);
  const std::vector<double> g(2, 1.0);
  EXPECT_THROW(adadelta_step<double>(x, g, state, 0), ShapeMismatch);
  EXPECT_THROW(adadelta_step<double>(x, std::vector<double>(3, 1.0), state, 1), ShapeMismatch);
  std::vector<Tensor<double>> two{Tensor<double>(Shape{3}), Tensor<double>(Shape{1})};
  EXPECT_THROW(adadelta_step(two, state), ShapeMismatch);
}

TEST(AdaDelta, MissingGradientCountsAsZero) {
  Tensor<float> p(Shape{2}, std::vector<float>{1.0f, 2.0f}, true);
  std::vector<Tensor<float>> params{p};
  auto state = make_adadelta_state(params);
  adadelta_step(params, state);
  EXPECT_EQ(p.data()[0], 1.0f);
  EXPECT_EQ(p.data()[1], 2.0f);
}
