#include "fouriernet/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>

#include "fouriernet/error.hpp"

namespace fouriernet {

using ad::Tensor;

void NetworkConfig::validate() const {
  if (depth < 1) throw ConfigError("depth must be >= 1");
  if (base_channels < 1) throw ConfigError("base_channels must be >= 1");
  if (num_classes < 2) throw ConfigError("num_classes must be >= 2");
  if (descriptor_order < 0) throw ConfigError("descriptor_order must be >= 0");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) throw ConfigError("dropout_rate must lie in [0, 1)");
  if (depth > 16) throw ConfigError("depth too large");
  const int step = 1 << depth;
  if (input_height < step || input_width < step || input_height % step || input_width % step) {
    throw ConfigError("input " + std::to_string(input_height) + "x" + std::to_string(input_width) +
                      " is not divisible by 2^depth = " + std::to_string(step));
  }
}

NetworkConfig NetworkConfig::desk() {
  NetworkConfig c;
  c.depth = 3;
  c.base_channels = 16;
  c.input_height = 64;
  c.input_width = 128;
  return c;
}

std::vector<float> PosteriorMap::channel(int cls) const {
  const std::size_t plane = static_cast<std::size_t>(height) * width;
  const auto begin = data.begin() + static_cast<std::ptrdiff_t>(cls * plane);
  return {begin, begin + static_cast<std::ptrdiff_t>(plane)};
}

namespace {

std::size_t channels_at(const NetworkConfig& c, int level) {
  return static_cast<std::size_t>(c.base_channels) << level;
}

template <typename T>
Conv3x3<T> make_conv(std::size_t in, std::size_t out, ad::Rng& rng) {
  // He-uniform: U(-sqrt(6 / fan_in), sqrt(6 / fan_in)).
  const double limit = std::sqrt(6.0 / static_cast<double>(in * 9));
  std::uniform_real_distribution<double> dist(-limit, limit);
  std::vector<T> w(out * in * 9);
  for (auto& v : w) v = static_cast<T>(dist(rng));
  return {Tensor<T>({out, in, 3, 3}, std::move(w), true), Tensor<T>({out}, true)};
}

template <typename T>
Tensor<T> conv_relu(const Conv3x3<T>& c, const Tensor<T>& x) {
  return ad::relu(ad::conv2d(x, c.weight, c.bias));
}

std::size_t conv_params(std::size_t in, std::size_t out) { return (in * 9 + 1) * out; }

std::size_t encoder_params(const NetworkConfig& c, std::size_t in) {
  std::size_t total = 0;
  for (int l = 0; l < c.depth; ++l) {
    const std::size_t cl = channels_at(c, l);
    total += conv_params(l == 0 ? in : channels_at(c, l - 1), cl) + conv_params(cl, cl);
  }
  const std::size_t cd = channels_at(c, c.depth);
  return total + conv_params(channels_at(c, c.depth - 1), cd) + conv_params(cd, cd);
}

std::size_t decoder_params(const NetworkConfig& c, std::size_t out) {
  std::size_t total = 0;
  for (int l = 0; l < c.depth; ++l) {
    const std::size_t cl = channels_at(c, l);
    total += conv_params(channels_at(c, l + 1), cl) + conv_params(2 * cl, cl) + conv_params(cl, cl);
  }
  return total + conv_params(channels_at(c, 0), out);
}

}  // namespace

std::size_t expected_parameter_count(const NetworkConfig& c) {
  const auto n = static_cast<std::size_t>(c.descriptor_order);
  std::size_t total = encoder_params(c, n + 1) + decoder_params(c, static_cast<std::size_t>(c.num_classes));
  if (n > 0) total += encoder_params(c, 1) + n * decoder_params(c, 1);
  return total;
}

template <typename T>
CascadedNet<T>::CascadedNet(const NetworkConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  ad::Rng rng(seed);
  const int n = config_.descriptor_order;
  if (n > 0) {
    stage1_encoder_ = make_encoder(1, rng);
    for (int k = 0; k < n; ++k) stage1_decoders_.push_back(make_decoder(1, rng));
  }
  stage2_encoder_ = make_encoder(n + 1, rng);
  stage2_decoder_ = make_decoder(config_.num_classes, rng);
}

template <typename T>
typename CascadedNet<T>::Encoder CascadedNet<T>::make_encoder(int in_channels, ad::Rng& rng) const {
  Encoder e;
  for (int l = 0; l < config_.depth; ++l) {
    const std::size_t in = l == 0 ? static_cast<std::size_t>(in_channels) : channels_at(config_, l - 1);
    const std::size_t out = channels_at(config_, l);
    e.first.push_back(make_conv<T>(in, out, rng));
    e.second.push_back(make_conv<T>(out, out, rng));
  }
  const std::size_t last = channels_at(config_, config_.depth - 1), bottom = channels_at(config_, config_.depth);
  e.bottleneck_a = make_conv<T>(last, bottom, rng);
  e.bottleneck_b = make_conv<T>(bottom, bottom, rng);
  return e;
}

template <typename T>
typename CascadedNet<T>::Decoder CascadedNet<T>::make_decoder(int out_channels, ad::Rng& rng) const {
  Decoder d;
  for (int l = 0; l < config_.depth; ++l) {
    const std::size_t cl = channels_at(config_, l);
    d.up.push_back(make_conv<T>(channels_at(config_, l + 1), cl, rng));
    d.merge.push_back(make_conv<T>(2 * cl, cl, rng));
    d.refine.push_back(make_conv<T>(cl, cl, rng));
  }
  d.head = make_conv<T>(channels_at(config_, 0), static_cast<std::size_t>(out_channels), rng);
  return d;
}

template <typename T>
typename CascadedNet<T>::Encoded CascadedNet<T>::encode(const Encoder& e, const Tensor<T>& input, bool training,
                                                        ad::Rng& rng) const {
  Encoded out;
  Tensor<T> x = input;
  for (int l = 0; l < config_.depth; ++l) {
    x = conv_relu(e.second[l], conv_relu(e.first[l], x));
    if (l == config_.depth - 1) x = ad::dropout(x, config_.dropout_rate, training, rng);
    out.skips.push_back(x);
    x = ad::maxpool2(x);
  }
  x = conv_relu(e.bottleneck_b, conv_relu(e.bottleneck_a, x));
  out.bottom = ad::dropout(x, config_.dropout_rate, training, rng);
  return out;
}

template <typename T>
Tensor<T> CascadedNet<T>::decode(const Decoder& d, const Encoded& enc) const {
  Tensor<T> x = enc.bottom;
  for (int l = config_.depth - 1; l >= 0; --l) {
    x = conv_relu(d.up[l], ad::upsample2(x));
    x = ad::concat_channels<T>({enc.skips[l], x});
    x = conv_relu(d.refine[l], conv_relu(d.merge[l], x));
  }
  return ad::conv2d(x, d.head.weight, d.head.bias);
}

template <typename T>
CascadeOutput<T> CascadedNet<T>::forward(const Tensor<T>& image, bool training, ad::Rng& rng) const {
  if (image.shape().size() != 4 || image.dim(1) != 1) {
    throw ShapeMismatch("network input must be B x 1 x H x W, got " + ad::to_string(image.shape()));
  }
  const std::size_t step = std::size_t{1} << config_.depth;
  if (image.dim(2) % step || image.dim(3) % step || image.dim(2) == 0 || image.dim(3) == 0) {
    throw ShapeMismatch("input " + ad::to_string(image.shape()) + " is not divisible by 2^depth");
  }
  CascadeOutput<T> out;
  std::vector<Tensor<T>> stage2_inputs;
  if (!stage1_decoders_.empty()) {
    const Encoded shared = encode(stage1_encoder_, image, training, rng);
    for (const auto& d : stage1_decoders_) out.descriptors.push_back(decode(d, shared));
    stage2_inputs = out.descriptors;
  }
  stage2_inputs.push_back(image);
  const Tensor<T> x = stage2_inputs.size() == 1 ? image : ad::concat_channels(stage2_inputs);
  out.logits = decode(stage2_decoder_, encode(stage2_encoder_, x, training, rng));
  out.posteriors = ad::softmax_channels(out.logits);
  return out;
}

template <typename T>
void CascadedNet<T>::collect(std::vector<std::pair<std::string, Tensor<T>>>& out) const {
  const auto add_conv = [&](const std::string& name, const Conv3x3<T>& c) {
    out.emplace_back(name + ".w", c.weight);
    out.emplace_back(name + ".b", c.bias);
  };
  const auto add_encoder = [&](const std::string& prefix, const Encoder& e) {
    for (int l = 0; l < config_.depth; ++l) {
      add_conv(prefix + ".l" + std::to_string(l) + ".first", e.first[l]);
      add_conv(prefix + ".l" + std::to_string(l) + ".second", e.second[l]);
    }
    add_conv(prefix + ".bottleneck_a", e.bottleneck_a);
    add_conv(prefix + ".bottleneck_b", e.bottleneck_b);
  };
  const auto add_decoder = [&](const std::string& prefix, const Decoder& d) {
    for (int l = 0; l < config_.depth; ++l) {
      add_conv(prefix + ".l" + std::to_string(l) + ".up", d.up[l]);
      add_conv(prefix + ".l" + std::to_string(l) + ".merge", d.merge[l]);
      add_conv(prefix + ".l" + std::to_string(l) + ".refine", d.refine[l]);
    }
    add_conv(prefix + ".head", d.head);
  };
  if (!stage1_decoders_.empty()) {
    add_encoder("s1.enc", stage1_encoder_);
    for (std::size_t k = 0; k < stage1_decoders_.size(); ++k)
      add_decoder("s1.dec" + std::to_string(k), stage1_decoders_[k]);
  }
  add_encoder("s2.enc", stage2_encoder_);
  add_decoder("s2.dec", stage2_decoder_);
}

template <typename T>
std::vector<Tensor<T>> CascadedNet<T>::parameters() const {
  std::vector<std::pair<std::string, Tensor<T>>> named;
  collect(named);
  std::vector<Tensor<T>> out;
  for (auto& [name, t] : named) out.push_back(t);
  return out;
}

template <typename T>
std::vector<std::string> CascadedNet<T>::parameter_names() const {
  std::vector<std::pair<std::string, Tensor<T>>> named;
  collect(named);
  std::vector<std::string> out;
  for (auto& [name, t] : named) out.push_back(name);
  return out;
}

template <typename T>
std::size_t CascadedNet<T>::parameter_count() const {
  std::size_t total = 0;
  for (const auto& p : parameters()) total += p.numel();
  return total;
}

template <typename T>
std::vector<NamedTensor> CascadedNet<T>::state() const {
  std::vector<std::pair<std::string, Tensor<T>>> named;
  collect(named);
  std::vector<NamedTensor> out;
  for (auto& [name, t] : named) {
    out.push_back({name, t.shape(), std::vector<float>(t.data().begin(), t.data().end())});
  }
  return out;
}

template <typename T>
void CascadedNet<T>::load_state(const std::vector<NamedTensor>& state) {
  std::vector<std::pair<std::string, Tensor<T>>> named;
  collect(named);
  if (state.size() != named.size()) {
    throw ShapeMismatch("checkpoint holds " + std::to_string(state.size()) + " tensors, model expects " +
                        std::to_string(named.size()));
  }
  for (std::size_t k = 0; k < named.size(); ++k) {
    auto& [name, t] = named[k];
    if (state[k].name != name || state[k].shape != t.shape()) {
      throw ShapeMismatch("checkpoint tensor " + state[k].name + " " + ad::to_string(state[k].shape) +
                          " does not match " + name + " " + ad::to_string(t.shape()));
    }
    std::copy(state[k].data.begin(), state[k].data.end(), t.mutable_data().begin());
  }
}

template <typename T>
void CascadedNet<T>::zero_grad() {
  for (auto& p : parameters()) p.zero_grad();
}

NetworkConfig infer_config(const std::vector<NamedTensor>& state) {
  std::map<std::string, const NamedTensor*> by_name;
  for (const auto& t : state) by_name[t.name] = &t;
  const auto find = [&](const std::string& name) -> const NamedTensor& {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw FormatError("checkpoint lacks tensor " + name);
    return *it->second;
  };
  NetworkConfig c;
  c.depth = 0;
  while (by_name.count("s2.enc.l" + std::to_string(c.depth) + ".first.w")) ++c.depth;
  if (c.depth == 0) throw FormatError("checkpoint has no stage 2 encoder");
  const auto& first = find("s2.enc.l0.first.w");
  c.base_channels = static_cast<int>(first.shape.at(0));
  c.descriptor_order = static_cast<int>(first.shape.at(1)) - 1;
  c.num_classes = static_cast<int>(find("s2.dec.head.w").shape.at(0));
  std::set<std::string> decoders;
  for (const auto& t : state)
    if (t.name.rfind("s1.dec", 0) == 0) decoders.insert(t.name.substr(0, t.name.find('.', 3)));
  if (static_cast<int>(decoders.size()) != c.descriptor_order) {
    throw FormatError("checkpoint stage 1 decoder count disagrees with stage 2 input channels");
  }
  const int step = 1 << c.depth;
  c.input_height = std::max(step, c.input_height / step * step);
  c.input_width = std::max(step, c.input_width / step * step);
  return c;
}

template <typename T>
Tensor<T> joint_loss(const CascadeOutput<T>& output, const std::vector<Tensor<T>>& descriptor_targets,
                     const Tensor<T>& labels, const LossWeights& weights) {
  if (descriptor_targets.size() != output.descriptors.size()) {
    throw ShapeMismatch("joint_loss: " + std::to_string(output.descriptors.size()) + " descriptor outputs but " +
                        std::to_string(descriptor_targets.size()) + " targets");
  }
  if (!weights.regression.empty() && weights.regression.size() != descriptor_targets.size()) {
    throw ShapeMismatch("joint_loss: regression weight count differs from descriptor count");
  }
  Tensor<T> total = ad::scale(ad::softmax_cross_entropy(output.logits, labels), weights.classification);
  for (std::size_t k = 0; k < descriptor_targets.size(); ++k) {
    const double w = weights.regression.empty() ? 1.0 : weights.regression[k];
    total = ad::add(total, ad::scale(ad::mse_loss(output.descriptors[k], descriptor_targets[k]), w));
  }
  return total;
}

Prediction predict(const CascadedNet<float>& model, int height, int width, std::span<const float> image) {
  if (height <= 0 || width <= 0 || image.size() != static_cast<std::size_t>(height) * width) {
    throw ShapeMismatch("predict: image buffer does not hold " + std::to_string(height) + "x" +
                        std::to_string(width) + " pixels");
  }
  if (height != model.config().input_height || width != model.config().input_width) {
    throw ShapeMismatch("predict: image is " + std::to_string(height) + "x" + std::to_string(width) +
                        ", model configured for " + std::to_string(model.config().input_height) + "x" +
                        std::to_string(model.config().input_width));
  }
  ad::NoGradGuard no_grad;
  ad::Rng unused(0);
  const Tensor<float> x({1, 1, static_cast<std::size_t>(height), static_cast<std::size_t>(width)},
                        std::vector<float>(image.begin(), image.end()));
  const auto out = model.forward(x, false, unused);
  Prediction p;
  const int n = static_cast<int>(out.descriptors.size());
  p.descriptors = DescriptorMap(height, width, n);
  for (int k = 0; k < n; ++k) {
    const auto values = out.descriptors[k].data();
    for (int r = 0; r < height; ++r)
      for (int c = 0; c < width; ++c)
        p.descriptors.at(r, c, k) = values[static_cast<std::size_t>(r) * width + c];
  }
  p.posteriors.classes = static_cast<int>(out.posteriors.dim(1));
  p.posteriors.height = height;
  p.posteriors.width = width;
  p.posteriors.data.assign(out.posteriors.data().begin(), out.posteriors.data().end());
  return p;
}

template class CascadedNet<float>;
template class CascadedNet<double>;
template Tensor<float> joint_loss<float>(const CascadeOutput<float>&, const std::vector<Tensor<float>>&,
                                         const Tensor<float>&, const LossWeights&);
template Tensor<double> joint_loss<double>(const CascadeOutput<double>&, const std::vector<Tensor<double>>&,
                                           const Tensor<double>&, const LossWeights&);

}  // namespace fouriernet
