#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "fouriernet/mask.hpp"
#include "fouriernet/model.hpp"
#include "fouriernet/pgm.hpp"

namespace fouriernet {

// One image with its regression and classification targets, as 1 x C x H x W
// tensors ready for the network.
struct TrainingSample {
  ad::Tensor<float> image;
  std::vector<ad::Tensor<float>> descriptors;  // one 1 x 1 x H x W map per harmonic
  ad::Tensor<float> labels;                    // one-hot, 1 x classes x H x W
};

// Descriptor targets come from generate_descriptor_maps(mask, order).
TrainingSample make_training_sample(const GrayImage& image, const BinaryMask& mask, int order,
                                    int num_classes = 2);
TrainingSample make_training_sample(const GrayImage& image, const BinaryMask& mask, const DescriptorMap& maps,
                                    int num_classes = 2);

struct TrainConfig {
  int batch_size = 1;
  int early_stop_patience = 50;
  int max_epochs = 500;
  LossWeights loss_weights;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

// Tracks the best validation loss; a loss counts as an improvement only when
// strictly lower than the best so far.
class EarlyStopping {
 public:
  explicit EarlyStopping(int patience);

  // Returns true if `loss` improved on the best.
  bool update(int epoch, double loss);
  bool should_stop() const { return epochs_since_best_ >= patience_; }
  int best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_loss_; }

 private:
  int patience_;
  int best_epoch_ = 0;
  double best_loss_;
  int epochs_since_best_ = 0;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  double best_val_loss = 0.0;
  bool stopped_early = false;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Seeded shuffle, AdaDelta on the joint loss, validation loss after every
// epoch, early stopping. On return the model holds the best-validation
// parameters. Throws EmptyDataset.
TrainResult train(CascadedNet<float>& model, const std::vector<TrainingSample>& train_set,
                  const std::vector<TrainingSample>& validation_set, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

// Mean joint loss in inference mode.
double evaluate_loss(const CascadedNet<float>& model, const std::vector<TrainingSample>& samples,
                     const LossWeights& weights = {});

// epoch,train_loss,val_loss
void write_history_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& history);

}  // namespace fouriernet
