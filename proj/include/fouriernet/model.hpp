#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fouriernet/checkpoint.hpp"
#include "fouriernet/descriptor_map.hpp"
#include "fouriernet/ops.hpp"
#include "fouriernet/posterior.hpp"
#include "fouriernet/tensor.hpp"

namespace fouriernet {

struct NetworkConfig {
  int depth = 4;
  int base_channels = 32;
  int num_classes = 2;
  int descriptor_order = 1;  // 0 = plain U-Net baseline
  int input_height = 256;
  int input_width = 512;
  double dropout_rate = 0.2;

  // Throws ConfigError.
  void validate() const;

  // 64x128, depth 3, base 16.
  static NetworkConfig desk();
};

template <typename T>
struct Conv3x3 {
  ad::Tensor<T> weight;  // OutC x InC x 3 x 3
  ad::Tensor<T> bias;    // OutC
};

template <typename T>
struct CascadeOutput {
  std::vector<ad::Tensor<T>> descriptors;  // N tensors, each B x 1 x H x W
  ad::Tensor<T> logits;                    // B x classes x H x W, before softmax
  ad::Tensor<T> posteriors;                // softmax of logits
};

// Stage 1: one shared encoder with N decoders regressing descriptor maps.
// Stage 2: a U-Net classifying concat(descriptor predictions, image).
template <typename T>
class CascadedNet {
 public:
  CascadedNet(const NetworkConfig& config, std::uint64_t seed);

  const NetworkConfig& config() const { return config_; }

  // image: B x 1 x H x W with H, W divisible by 2^depth.
  CascadeOutput<T> forward(const ad::Tensor<T>& image, bool training, ad::Rng& rng) const;

  // Stable order: stage 1 encoder, stage 1 decoders, stage 2 encoder, stage 2 decoder.
  std::vector<ad::Tensor<T>> parameters() const;
  std::vector<std::string> parameter_names() const;
  std::size_t parameter_count() const;

  std::vector<NamedTensor> state() const;
  // Copies values in; names and shapes must match exactly.
  void load_state(const std::vector<NamedTensor>& state);
  void zero_grad();

 private:
  struct Encoder {
    std::vector<Conv3x3<T>> first, second;  // per level
    Conv3x3<T> bottleneck_a, bottleneck_b;
  };
  struct Decoder {
    std::vector<Conv3x3<T>> up, merge, refine;  // per level
    Conv3x3<T> head;
  };
  struct Encoded {
    std::vector<ad::Tensor<T>> skips;
    ad::Tensor<T> bottom;
  };

  Encoder make_encoder(int in_channels, ad::Rng& rng) const;
  Decoder make_decoder(int out_channels, ad::Rng& rng) const;
  Encoded encode(const Encoder& e, const ad::Tensor<T>& x, bool training, ad::Rng& rng) const;
  ad::Tensor<T> decode(const Decoder& d, const Encoded& enc) const;
  void collect(std::vector<std::pair<std::string, ad::Tensor<T>>>& out) const;

  NetworkConfig config_;
  Encoder stage1_encoder_;
  std::vector<Decoder> stage1_decoders_;
  Encoder stage2_encoder_;
  Decoder stage2_decoder_;
};

// Closed-form parameter count of the network described by `config`.
std::size_t expected_parameter_count(const NetworkConfig& config);

// Recovers depth, base width, classes and descriptor order from checkpoint
// names and shapes. Input size is left at the defaults.
NetworkConfig infer_config(const std::vector<NamedTensor>& state);

struct LossWeights {
  std::vector<double> regression;  // empty = 1 for every descriptor
  double classification = 1.0;
};

// sum_n w_n mse(pred_n, target_n) + w_c cross_entropy(posteriors, labels), the
// cross-entropy being evaluated from the logits in the log domain.
template <typename T>
ad::Tensor<T> joint_loss(const CascadeOutput<T>& output, const std::vector<ad::Tensor<T>>& descriptor_targets,
                         const ad::Tensor<T>& labels, const LossWeights& weights = {});

struct Prediction {
  DescriptorMap descriptors;
  PosteriorMap posteriors;
};

// Inference: dropout off, no graph recorded.
Prediction predict(const CascadedNet<float>& model, int height, int width, std::span<const float> image);

extern template class CascadedNet<float>;
extern template class CascadedNet<double>;

}  // namespace fouriernet
