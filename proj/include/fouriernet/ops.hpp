#pragma once

#include <random>
#include <vector>

#include "fouriernet/tensor.hpp"

// Differentiable layers used by the segmentation networks. All image tensors
// are NCHW. Reductions accumulate in double regardless of T.
namespace fouriernet::ad {

using Rng = std::mt19937_64;

// 3x3 convolution, stride 1, zero padding 1. weights: OutC x InC x 3 x 3, bias: OutC.
template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& weights, const Tensor<T>& bias);

// 2x2 max pooling; the gradient goes to the first maximum in raster order.
template <typename T>
Tensor<T> maxpool2(const Tensor<T>& input);

// 2x nearest-neighbour upsampling.
template <typename T>
Tensor<T> upsample2(const Tensor<T>& input);

template <typename T>
Tensor<T> relu(const Tensor<T>& input);

// Inverted dropout. Returns `input` itself when not training or rate == 0.
template <typename T>
Tensor<T> dropout(const Tensor<T>& input, double rate, bool training, Rng& rng);

// Softmax over axis 1, max-subtracted per pixel.
template <typename T>
Tensor<T> softmax_channels(const Tensor<T>& input);

// Concatenation along axis 1; all parts share N, H and W.
template <typename T>
Tensor<T> concat_channels(const std::vector<Tensor<T>>& parts);

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> scale(const Tensor<T>& a, double factor);

// Mean squared error over all entries; returns a one-element tensor.
template <typename T>
Tensor<T> mse_loss(const Tensor<T>& prediction, const Tensor<T>& target);

// Mean over pixels of -log(max(p_true, 1e-12)); labels are one-hot NCHW.
template <typename T>
Tensor<T> cross_entropy_loss(const Tensor<T>& posteriors, const Tensor<T>& labels);

// Cross-entropy of softmax_channels(logits) computed in the log domain:
// mean over pixels of -sum_k y_k log_softmax(z)_k. No floor is needed, and the
// logit gradient (p - y) never vanishes on confidently wrong pixels.
template <typename T>
Tensor<T> softmax_cross_entropy(const Tensor<T>& logits, const Tensor<T>& labels);

inline constexpr double kPosteriorFloor = 1e-12;

}  // namespace fouriernet::ad
