#include "fouriernet/experiment.hpp"

#include <cmath>

#include "fouriernet/error.hpp"
#include "fouriernet/pgm.hpp"

namespace fouriernet {

namespace {

std::vector<LabeledSample>& bucket(Dataset& d, Split split) {
  switch (split) {
    case Split::Train: return d.train;
    case Split::Validation: return d.validation;
    case Split::Test: return d.test;
  }
  return d.train;
}

}  // namespace

Dataset make_dataset(const std::vector<SyntheticSample>& samples, int order) {
  Dataset d;
  for (const auto& s : samples) {
    bucket(d, s.params.split)
        .push_back({sample_stem(s.params.group, s.params.slice), make_training_sample(s.image, s.mask, order),
                    s.mask});
  }
  return d;
}

Dataset load_dataset(const std::filesystem::path& dir, int order) {
  Dataset d;
  for (const auto& e : read_dataset_manifest(dir)) {
    const GrayImage image = read_image_pgm(e.image_path);
    const BinaryMask mask = read_mask_pgm(e.mask_path);
    bucket(d, e.params.split)
        .push_back({sample_stem(e.params.group, e.params.slice), make_training_sample(image, mask, order), mask});
  }
  return d;
}

std::vector<TrainingSample> tensors_of(const std::vector<LabeledSample>& samples) {
  std::vector<TrainingSample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.tensors);
  return out;
}

ExperimentConfig parse_experiment_config(const KvConfig& kv) {
  kv.require_known({"depth", "base_channels", "num_classes", "descriptor_order", "input_height", "input_width",
                    "dropout_rate", "batch_size", "early_stop_patience", "max_epochs", "seed",
                    "regression_weights", "classification_weight"});
  ExperimentConfig c;
  auto& n = c.network;
  n.depth = kv.get_int("depth", n.depth);
  n.base_channels = kv.get_int("base_channels", n.base_channels);
  n.num_classes = kv.get_int("num_classes", n.num_classes);
  n.descriptor_order = kv.get_int("descriptor_order", n.descriptor_order);
  n.input_height = kv.get_int("input_height", n.input_height);
  n.input_width = kv.get_int("input_width", n.input_width);
  n.dropout_rate = kv.get_double("dropout_rate", n.dropout_rate);
  auto& t = c.train;
  t.batch_size = kv.get_int("batch_size", t.batch_size);
  t.early_stop_patience = kv.get_int("early_stop_patience", t.early_stop_patience);
  t.max_epochs = kv.get_int("max_epochs", t.max_epochs);
  t.seed = kv.get_u64("seed", t.seed);
  t.loss_weights.regression = kv.get_doubles("regression_weights");
  t.loss_weights.classification = kv.get_double("classification_weight", t.loss_weights.classification);
  n.validate();
  t.validate();
  return c;
}

BinaryMask segment(const CascadedNet<float>& model, int height, int width, std::span<const float> image) {
  const Prediction p = predict(model, height, width, image);
  return postprocess_columns(threshold_posteriors(p.posteriors));
}

SegmentationScore score_model(const CascadedNet<float>& model, const std::vector<LabeledSample>& samples) {
  SegmentationScore score;
  for (const auto& s : samples) {
    const auto& img = s.tensors.image;
    const BinaryMask predicted =
        segment(model, static_cast<int>(img.dim(2)), static_cast<int>(img.dim(3)), img.data());
    score.per_image.push_back(pixel_metrics(predicted, s.mask));
  }
  score.mean = mean_metrics(score.per_image);
  return score;
}

RunOutcome run_experiment(const ExperimentConfig& config, const Dataset& data, std::uint64_t seed,
                          CascadedNet<float>* model_out, const EpochCallback& on_epoch) {
  if (data.test.empty()) throw EmptyDataset("test split is empty");
  CascadedNet<float> model(config.network, seed);
  TrainConfig tc = config.train;
  tc.seed = seed;
  RunOutcome outcome;
  outcome.training = train(model, tensors_of(data.train), tensors_of(data.validation), tc, on_epoch);
  outcome.test = score_model(model, data.test);
  if (model_out) *model_out = std::move(model);
  return outcome;
}

void summarize(SweepRow& row) {
  const auto n = static_cast<double>(row.runs.size());
  row.mean = mean_metrics(row.runs);
  row.stddev = {};
  if (row.runs.size() < 2) return;
  for (const auto& m : row.runs) {
    row.stddev.precision += std::pow(m.precision - row.mean.precision, 2);
    row.stddev.recall += std::pow(m.recall - row.mean.recall, 2);
    row.stddev.f_score += std::pow(m.f_score - row.mean.f_score, 2);
  }
  row.stddev.precision = std::sqrt(row.stddev.precision / (n - 1));
  row.stddev.recall = std::sqrt(row.stddev.recall / (n - 1));
  row.stddev.f_score = std::sqrt(row.stddev.f_score / (n - 1));
}

}  // namespace fouriernet
