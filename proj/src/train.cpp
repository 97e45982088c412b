#include "fouriernet/train.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "fouriernet/adadelta.hpp"
#include "fouriernet/error.hpp"

namespace fouriernet {

using ad::Tensor;

TrainingSample make_training_sample(const GrayImage& image, const BinaryMask& mask, int order, int num_classes) {
  return make_training_sample(image, mask, generate_descriptor_maps(mask, std::max(order, 1)), num_classes);
}

TrainingSample make_training_sample(const GrayImage& image, const BinaryMask& mask, const DescriptorMap& maps,
                                    int num_classes) {
  if (image.height != mask.height() || image.width != mask.width() || maps.height() != mask.height() ||
      maps.width() != mask.width()) {
    throw ShapeMismatch("image, mask and descriptor maps differ in size");
  }
  if (num_classes != 2) throw ConfigError("binary masks need num_classes = 2");
  const auto h = static_cast<std::size_t>(image.height), w = static_cast<std::size_t>(image.width);
  const std::size_t plane = h * w;
  TrainingSample s;
  s.image = Tensor<float>({1, 1, h, w}, image.data);
  for (int n = 0; n < maps.order(); ++n) s.descriptors.emplace_back(ad::Shape{1, 1, h, w}, maps.channel(n));
  std::vector<float> labels(2 * plane, 0.0f);
  for (std::size_t i = 0; i < plane; ++i) labels[(mask.data()[i] ? plane : 0) + i] = 1.0f;
  s.labels = Tensor<float>({1, 2, h, w}, std::move(labels));
  return s;
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (early_stop_patience < 1) throw ConfigError("early_stop_patience must be >= 1");
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
}

EarlyStopping::EarlyStopping(int patience)
    : patience_(patience), best_loss_(std::numeric_limits<double>::infinity()) {
  if (patience < 1) throw ConfigError("patience must be >= 1");
}

bool EarlyStopping::update(int epoch, double loss) {
  if (loss < best_loss_) {
    best_loss_ = loss;
    best_epoch_ = epoch;
    epochs_since_best_ = 0;
    return true;
  }
  ++epochs_since_best_;
  return false;
}

namespace {

std::vector<Tensor<float>> targets_for(const CascadedNet<float>& model, const TrainingSample& s) {
  const auto n = static_cast<std::size_t>(model.config().descriptor_order);
  if (s.descriptors.size() < n) throw ShapeMismatch("sample carries fewer descriptor maps than the model order");
  return {s.descriptors.begin(), s.descriptors.begin() + static_cast<std::ptrdiff_t>(n)};
}

}  // namespace

double evaluate_loss(const CascadedNet<float>& model, const std::vector<TrainingSample>& samples,
                     const LossWeights& weights) {
  if (samples.empty()) throw EmptyDataset("no samples to evaluate");
  ad::NoGradGuard no_grad;
  ad::Rng unused(0);
  double total = 0.0;
  for (const auto& s : samples) {
    const auto out = model.forward(s.image, false, unused);
    total += joint_loss(out, targets_for(model, s), s.labels, weights).item();
  }
  return total / static_cast<double>(samples.size());
}

TrainResult train(CascadedNet<float>& model, const std::vector<TrainingSample>& train_set,
                  const std::vector<TrainingSample>& validation_set, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.empty()) throw EmptyDataset("training set is empty");
  if (validation_set.empty()) throw EmptyDataset("validation set is empty");

  auto params = model.parameters();
  auto state = ad::make_adadelta_state(params);
  ad::Rng shuffle_rng(config.seed);
  ad::Rng dropout_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  EarlyStopping stopper(config.early_stop_patience);
  std::vector<NamedTensor> best = model.state();

  TrainResult result;
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const double batch_scale = 1.0 / config.batch_size;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double train_total = 0.0;
    std::size_t in_batch = 0;
    model.zero_grad();
    for (std::size_t k = 0; k < order.size(); ++k) {
      const auto& s = train_set[order[k]];
      const auto out = model.forward(s.image, true, dropout_rng);
      const auto loss = joint_loss(out, targets_for(model, s), s.labels, config.loss_weights);
      train_total += loss.item();
      ad::backward(config.batch_size == 1 ? loss : ad::scale(loss, batch_scale));
      if (++in_batch == static_cast<std::size_t>(config.batch_size) || k + 1 == order.size()) {
        ad::adadelta_step(params, state);
        model.zero_grad();
        in_batch = 0;
      }
    }
    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = train_total / static_cast<double>(train_set.size());
    record.val_loss = evaluate_loss(model, validation_set, config.loss_weights);
    result.history.push_back(record);
    if (stopper.update(epoch, record.val_loss)) best = model.state();
    if (on_epoch) on_epoch(record);
    if (stopper.should_stop()) {
      result.stopped_early = true;
      break;
    }
  }
  model.load_state(best);
  result.best_epoch = stopper.best_epoch();
  result.best_val_loss = stopper.best_loss();
  return result;
}

void write_history_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& history) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << "epoch,train_loss,val_loss\n";
  char line[96];
  for (const auto& r : history) {
    std::snprintf(line, sizeof line, "%d,%.9g,%.9g\n", r.epoch, r.train_loss, r.val_loss);
    out << line;
  }
}

}  // namespace fouriernet
