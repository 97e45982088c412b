#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fouriernet/evaluation.hpp"
#include "fouriernet/kv_config.hpp"
#include "fouriernet/model.hpp"
#include "fouriernet/synth.hpp"
#include "fouriernet/train.hpp"

// Glue shared by the command-line tool and the acceptance tests: dataset
// loading, configuration parsing and test-set scoring.
namespace fouriernet {

struct LabeledSample {
  std::string stem;
  TrainingSample tensors;
  BinaryMask mask;
};

struct Dataset {
  std::vector<LabeledSample> train, validation, test;
};

// Descriptor targets are generated up to `order` (at least 1 channel).
Dataset make_dataset(const std::vector<SyntheticSample>& samples, int order);
Dataset load_dataset(const std::filesystem::path& dir, int order);

std::vector<TrainingSample> tensors_of(const std::vector<LabeledSample>& samples);

struct ExperimentConfig {
  NetworkConfig network = NetworkConfig::desk();
  TrainConfig train;
};

// Every NetworkConfig and TrainConfig field; unknown keys throw ConfigError.
// Keys: depth, base_channels, num_classes, descriptor_order, input_height,
// input_width, dropout_rate, batch_size, early_stop_patience, max_epochs,
// seed, regression_weights (comma list), classification_weight.
ExperimentConfig parse_experiment_config(const KvConfig& config);

// Threshold at 0.5 then column postprocessing.
BinaryMask segment(const CascadedNet<float>& model, int height, int width, std::span<const float> image);

struct SegmentationScore {
  std::vector<PixelMetrics> per_image;
  PixelMetrics mean;
};

SegmentationScore score_model(const CascadedNet<float>& model, const std::vector<LabeledSample>& samples);

struct RunOutcome {
  TrainResult training;
  SegmentationScore test;
};

// Builds a model seeded with `seed`, trains it (shuffle seed = `seed`) and
// scores it on the test split. The trained model is returned through `model_out`
// when non-null.
RunOutcome run_experiment(const ExperimentConfig& config, const Dataset& data, std::uint64_t seed,
                          CascadedNet<float>* model_out = nullptr, const EpochCallback& on_epoch = {});

struct SweepRow {
  int order = 0;
  std::vector<PixelMetrics> runs;
  PixelMetrics mean;
  PixelMetrics stddev;  // sample standard deviation over runs
};

// mean and sample standard deviation of each metric.
void summarize(SweepRow& row);

}  // namespace fouriernet
