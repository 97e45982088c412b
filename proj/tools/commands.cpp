#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fouriernet/checkpoint.hpp"
#include "fouriernet/contour.hpp"
#include "fouriernet/descriptor_map.hpp"
#include "fouriernet/error.hpp"
#include "fouriernet/etdrs.hpp"
#include "fouriernet/fourier.hpp"
#include "fouriernet/pgm.hpp"

namespace fouriernet::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path parent_dir(const fs::path& file) {
  const fs::path parent = file.parent_path();
  return parent.empty() ? fs::path(".") : parent;
}

void ensure_parent(const fs::path& file) { fs::create_directories(parent_dir(file)); }

void require_exists(const fs::path& path, const std::string& what) {
  if (!fs::exists(path)) throw ConfigError(what + " " + path.string() + " does not exist");
}

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::map<std::string, std::string> snapshot(const ExperimentConfig& c) {
  const auto& n = c.network;
  const auto& t = c.train;
  std::string weights;
  for (std::size_t k = 0; k < t.loss_weights.regression.size(); ++k) {
    weights += (k ? "," : "") + format("%g", t.loss_weights.regression[k]);
  }
  return {{"depth", std::to_string(n.depth)},
          {"base_channels", std::to_string(n.base_channels)},
          {"num_classes", std::to_string(n.num_classes)},
          {"descriptor_order", std::to_string(n.descriptor_order)},
          {"input_height", std::to_string(n.input_height)},
          {"input_width", std::to_string(n.input_width)},
          {"dropout_rate", format("%g", n.dropout_rate)},
          {"batch_size", std::to_string(t.batch_size)},
          {"early_stop_patience", std::to_string(t.early_stop_patience)},
          {"max_epochs", std::to_string(t.max_epochs)},
          {"seed", std::to_string(t.seed)},
          {"regression_weights", weights},
          {"classification_weight", format("%g", t.loss_weights.classification)}};
}

// Reads the experiment config and adopts the data's image size unless the
// config pins it.
ExperimentConfig load_experiment(const std::optional<fs::path>& path, const Dataset* data) {
  KvConfig kv = path ? KvConfig::load(*path) : KvConfig{};
  if (data && !data->train.empty()) {
    const auto& img = data->train.front().tensors.image;
    if (!kv.has("input_height")) kv.set("input_height", std::to_string(img.dim(2)));
    if (!kv.has("input_width")) kv.set("input_width", std::to_string(img.dim(3)));
  }
  return parse_experiment_config(kv);
}

int config_order(const std::optional<fs::path>& path) {
  if (!path) return ExperimentConfig{}.network.descriptor_order;
  return KvConfig::load(*path).get_int("descriptor_order", ExperimentConfig{}.network.descriptor_order);
}

void check_dims(const ExperimentConfig& config, const Dataset& data) {
  for (const auto* split : {&data.train, &data.validation, &data.test}) {
    for (const auto& s : *split) {
      const auto& img = s.tensors.image;
      if (static_cast<int>(img.dim(2)) != config.network.input_height ||
          static_cast<int>(img.dim(3)) != config.network.input_width) {
        throw ShapeMismatch("sample " + s.stem + " does not match the configured input size");
      }
    }
  }
}

void write_metrics_csv(const fs::path& path, const std::vector<LabeledSample>& samples,
                       const SegmentationScore& score) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "image,precision,recall,f_score\n";
  char line[160];
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& m = score.per_image[i];
    std::snprintf(line, sizeof line, "%s,%.6f,%.6f,%.6f\n", samples[i].stem.c_str(), m.precision, m.recall,
                  m.f_score);
    out << line;
  }
  std::snprintf(line, sizeof line, "mean,%.6f,%.6f,%.6f\n", score.mean.precision, score.mean.recall,
                score.mean.f_score);
  out << line;
}

std::vector<fs::path> list_pgms(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".pgm") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

// "g007_s12" -> "g007"; stems without a slice suffix form their own volume.
std::string volume_key(const std::string& stem) {
  const auto pos = stem.rfind("_s");
  return pos == std::string::npos ? stem : stem.substr(0, pos);
}

}  // namespace

void write_manifest(const fs::path& dir, const RunManifest& m) {
  fs::create_directories(dir);
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["tool_version"] = kToolVersion;
  j["seed"] = m.seed;
  j["config"] = m.config;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  j["duration_seconds"] = m.duration_seconds;
  const fs::path target = dir / "run_manifest.json";
  const fs::path tmp = dir / "run_manifest.json.tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw FormatError("cannot write " + tmp.string());
    out << j.dump(2) << '\n';
    if (!out) throw FormatError("failed writing " + tmp.string());
  }
  fs::rename(tmp, target);
}

void cmd_descriptors(const DescriptorsOptions& o) {
  const auto start = Clock::now();
  require_exists(o.mask, "mask");
  if (o.order < 1) throw InvalidHarmonic("order must be >= 1");
  const BinaryMask mask = read_mask_pgm(o.mask);
  const Labeling labeling = connected_components(mask);
  ensure_parent(o.out);
  std::ofstream out(o.out);
  if (!out) throw FormatError("cannot write " + o.out.string());
  write_descriptor_csv_header(out);
  for (int label = 0; label < static_cast<int>(labeling.component_count()); ++label) {
    write_descriptor_csv_rows(out, label, descriptor_set(trace_contour(labeling, label), o.order));
  }
  out.close();
  write_manifest(parent_dir(o.out), {"descriptors",
                                     {{"order", std::to_string(o.order)}},
                                     {{"mask", o.mask.string()}},
                                     {{"csv", o.out.string()}},
                                     0,
                                     seconds_since(start)});
}

void cmd_maps(const MapsOptions& o) {
  const auto start = Clock::now();
  require_exists(o.mask, "mask");
  const BinaryMask mask = read_mask_pgm(o.mask);
  const DescriptorMap map = generate_descriptor_maps(mask, o.order);
  ensure_parent(o.out);
  write_fdm(o.out, map);
  RunManifest m{"maps", {{"order", std::to_string(o.order)}}, {{"mask", o.mask.string()}}, {{"fdm", o.out.string()}},
                0, 0.0};
  if (o.pgm_dir) {
    write_channel_pgms(*o.pgm_dir, o.out.stem().string(), map);
    m.outputs["pgm_dir"] = o.pgm_dir->string();
  }
  m.duration_seconds = seconds_since(start);
  write_manifest(parent_dir(o.out), m);
}

void cmd_synth(const SynthOptions& o) {
  const auto start = Clock::now();
  const auto samples = generate_dataset(o.config);
  write_dataset(o.out, samples);
  const auto& c = o.config;
  const auto counts = split_group_counts(c.groups);
  write_manifest(o.out, {"synth",
                         {{"groups", std::to_string(c.groups)},
                          {"images_per_group", std::to_string(c.images_per_group)},
                          {"height", std::to_string(c.height)},
                          {"width", std::to_string(c.width)},
                          {"noise", format("%g", c.noise)},
                          {"train_groups", std::to_string(counts[0])},
                          {"val_groups", std::to_string(counts[1])},
                          {"test_groups", std::to_string(counts[2])}},
                         {},
                         {{"manifest", (o.out / "dataset.jsonl").string()}},
                         c.seed,
                         seconds_since(start)});
}

void cmd_train(const TrainOptions& o) {
  const auto start = Clock::now();
  require_exists(o.data, "data directory");
  if (o.config) require_exists(*o.config, "config");
  const Dataset data = load_dataset(o.data, std::max(1, config_order(o.config)));
  ExperimentConfig config = load_experiment(o.config, &data);
  if (o.seed) config.train.seed = *o.seed;
  check_dims(config, data);
  fs::create_directories(o.out);

  CascadedNet<float> model(config.network, config.train.seed);
  EpochCallback log;
  if (o.verbose) {
    log = [](const EpochRecord& r) {
      std::fprintf(stderr, "epoch %d train %.6f val %.6f\n", r.epoch, r.train_loss, r.val_loss);
    };
  }
  const RunOutcome outcome = run_experiment(config, data, config.train.seed, &model, log);
  write_checkpoint(o.out / "checkpoint.fnck", model.state());
  write_history_csv(o.out / "history.csv", outcome.training.history);
  write_metrics_csv(o.out / "test_metrics.csv", data.test, outcome.test);

  RunManifest m{"train", snapshot(config), {{"data", o.data.string()}}, {}, config.train.seed, 0.0};
  if (o.config) m.inputs["config"] = o.config->string();
  m.outputs = {{"checkpoint", (o.out / "checkpoint.fnck").string()},
               {"history", (o.out / "history.csv").string()},
               {"test_metrics", (o.out / "test_metrics.csv").string()},
               {"best_epoch", std::to_string(outcome.training.best_epoch)},
               {"epochs_run", std::to_string(outcome.training.history.size())},
               {"test_f_score", format("%.6f", outcome.test.mean.f_score)}};
  m.duration_seconds = seconds_since(start);
  write_manifest(o.out, m);
}

void cmd_predict(const PredictOptions& o) {
  const auto start = Clock::now();
  require_exists(o.checkpoint, "checkpoint");
  require_exists(o.input, "input");
  const auto state = read_checkpoint(o.checkpoint);
  const std::vector<fs::path> images = fs::is_directory(o.input) ? list_pgms(o.input) : std::vector{o.input};
  if (images.empty()) throw EmptyDataset("no .pgm images in " + o.input.string());
  fs::create_directories(o.out);

  NetworkConfig config = infer_config(state);
  std::optional<CascadedNet<float>> model;
  for (const auto& path : images) {
    const GrayImage image = read_image_pgm(path);
    if (!model || image.height != config.input_height || image.width != config.input_width) {
      config.input_height = image.height;
      config.input_width = image.width;
      model.emplace(config, 0);
      model->load_state(state);
    }
    const Prediction p = predict(*model, image.height, image.width, image.data);
    const std::string stem = path.stem().string();
    write_mask_pgm(o.out / (stem + "_mask.pgm"), postprocess_columns(threshold_posteriors(p.posteriors)));
    write_image_pgm(o.out / (stem + "_posterior.pgm"),
                    GrayImage{image.height, image.width, p.posteriors.channel(kForegroundClass)});
    if (p.descriptors.order() > 0) write_fdm(o.out / (stem + ".fdm"), p.descriptors);
  }
  write_manifest(o.out, {"predict",
                         {{"depth", std::to_string(config.depth)},
                          {"base_channels", std::to_string(config.base_channels)},
                          {"descriptor_order", std::to_string(config.descriptor_order)}},
                         {{"checkpoint", o.checkpoint.string()}, {"input", o.input.string()}},
                         {{"images", std::to_string(images.size())}},
                         0,
                         seconds_since(start)});
}

void cmd_eval(const EvalOptions& o) {
  const auto start = Clock::now();
  require_exists(o.predictions, "prediction directory");
  require_exists(o.references, "reference directory");
  if (o.grid_config) require_exists(*o.grid_config, "grid config");

  // volume -> (stem, predicted, reference), slices in stem order
  std::map<std::string, std::vector<std::pair<BinaryMask, BinaryMask>>> volumes;
  EvalReport report;
  for (const auto& ref_path : list_pgms(o.references)) {
    const std::string stem = ref_path.stem().string();
    fs::path pred_path = o.predictions / (stem + "_mask.pgm");
    if (!fs::exists(pred_path)) pred_path = o.predictions / (stem + ".pgm");
    if (!fs::exists(pred_path)) continue;
    BinaryMask pred = read_mask_pgm(pred_path);
    BinaryMask ref = read_mask_pgm(ref_path);
    report.image_names.push_back(stem);
    report.per_image.push_back(pixel_metrics(pred, ref));
    volumes[volume_key(stem)].emplace_back(std::move(pred), std::move(ref));
  }
  if (report.per_image.empty()) throw EmptyDataset("no predictions match the reference masks");
  report.aggregate = mean_metrics(report.per_image);

  const KvConfig grid_kv = o.grid_config ? KvConfig::load(*o.grid_config) : KvConfig{};
  std::array<PixelCounts, kSectorCount> pooled{};
  for (const auto& [key, slices] : volumes) {
    std::vector<BinaryMask> pred, ref;
    for (const auto& [p, r] : slices) {
      pred.push_back(p);
      ref.push_back(r);
    }
    const EtdrsGrid grid = EtdrsGrid::from_config(
        grid_kv, scaled_grid(static_cast<int>(ref.size()), ref.front().height(), ref.front().width()));
    const auto counts = sector_counts(pred, ref, grid);
    for (std::size_t k = 0; k < kSectorCount; ++k) pooled[k] += counts[k];
    const VolumeReport pv = volume_and_thickness(pred, grid);
    const VolumeReport rv = volume_and_thickness(ref, grid);
    report.predicted_volume_mm3 += pv.total_volume_mm3;
    report.predicted_thickness_um += pv.average_thickness_um;
    report.reference_volume_mm3 += rv.total_volume_mm3;
    report.reference_thickness_um += rv.average_thickness_um;
  }
  report.volumes = volumes.size();
  const auto nv = static_cast<double>(report.volumes);
  report.predicted_volume_mm3 /= nv;
  report.predicted_thickness_um /= nv;
  report.reference_volume_mm3 /= nv;
  report.reference_thickness_um /= nv;
  for (std::size_t k = 0; k < kSectorCount; ++k) report.sector_f_score[k] = metrics_from_counts(pooled[k]).f_score;

  ensure_parent(o.out);
  {
    std::ofstream csv(o.out);
    if (!csv) throw FormatError("cannot write " + o.out.string());
    write_eval_csv(csv, report);
  }
  fs::path table_path = o.out;
  table_path.replace_extension(".txt");
  {
    std::ofstream table(table_path);
    write_eval_table(table, report);
  }
  RunManifest m{"eval", grid_kv.values(), {{"predictions", o.predictions.string()},
                                           {"references", o.references.string()}},
                {{"csv", o.out.string()}, {"table", table_path.string()}}, 0, seconds_since(start)};
  if (o.grid_config) m.inputs["grid_config"] = o.grid_config->string();
  write_manifest(parent_dir(o.out), m);
}

std::vector<SweepRow> cmd_sweep_n(const SweepOptions& o) {
  const auto start = Clock::now();
  require_exists(o.data, "data directory");
  if (o.config) require_exists(*o.config, "config");
  if (o.orders.empty()) throw ConfigError("N list is empty");
  if (o.runs < 1) throw ConfigError("runs must be >= 1");
  for (int n : o.orders)
    if (n < 0) throw ConfigError("N values must be >= 0");
  const int max_order = *std::max_element(o.orders.begin(), o.orders.end());
  const Dataset data = load_dataset(o.data, std::max(1, max_order));
  const ExperimentConfig base = load_experiment(o.config, &data);
  check_dims(base, data);

  std::vector<SweepRow> rows;
  ensure_parent(o.out);
  fs::path runs_path = o.out;
  runs_path.replace_extension(".runs.csv");
  std::ofstream runs_csv(runs_path);
  runs_csv << "N,seed,best_epoch,precision,recall,f_score\n";
  char line[200];
  for (int n : o.orders) {
    ExperimentConfig config = base;
    config.network.descriptor_order = n;
    config.train.loss_weights.regression.clear();
    SweepRow row;
    row.order = n;
    for (int r = 0; r < o.runs; ++r) {
      const std::uint64_t seed = o.seed + static_cast<std::uint64_t>(r);
      const RunOutcome outcome = run_experiment(config, data, seed);
      row.runs.push_back(outcome.test.mean);
      std::snprintf(line, sizeof line, "%d,%llu,%d,%.6f,%.6f,%.6f\n", n, static_cast<unsigned long long>(seed),
                    outcome.training.best_epoch, outcome.test.mean.precision, outcome.test.mean.recall,
                    outcome.test.mean.f_score);
      runs_csv << line;
      if (o.verbose) std::fprintf(stderr, "N=%d seed=%llu f=%.4f\n", n, static_cast<unsigned long long>(seed),
                                  outcome.test.mean.f_score);
    }
    summarize(row);
    rows.push_back(row);
  }
  runs_csv.close();

  std::ofstream out(o.out);
  if (!out) throw FormatError("cannot write " + o.out.string());
  out << "N,runs,precision_mean,precision_std,recall_mean,recall_std,f_score_mean,f_score_std\n";
  for (const auto& row : rows) {
    std::snprintf(line, sizeof line, "%d,%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", row.order, row.runs.size(),
                  row.mean.precision, row.stddev.precision, row.mean.recall, row.stddev.recall, row.mean.f_score,
                  row.stddev.f_score);
    out << line;
  }
  out.close();

  std::string order_list;
  for (std::size_t k = 0; k < o.orders.size(); ++k) order_list += (k ? "," : "") + std::to_string(o.orders[k]);
  RunManifest m{"sweep-n", snapshot(base), {{"data", o.data.string()}},
                {{"csv", o.out.string()}, {"runs_csv", runs_path.string()}}, o.seed, 0.0};
  m.config["N_list"] = order_list;
  m.config["runs"] = std::to_string(o.runs);
  if (o.config) m.inputs["config"] = o.config->string();
  m.duration_seconds = seconds_since(start);
  write_manifest(parent_dir(o.out), m);
  return rows;
}

int run(int argc, char** argv) {
  CLI::App app{"Fourier descriptor segmentation toolkit"};
  app.require_subcommand(1);

  DescriptorsOptions desc;
  auto* c_desc = app.add_subcommand("descriptors", "Fourier descriptors of every component in a mask");
  c_desc->add_option("--mask", desc.mask, "Binary mask PGM")->required();
  c_desc->add_option("--order", desc.order, "Number of harmonics N");
  c_desc->add_option("--out", desc.out, "Output CSV")->required();

  MapsOptions maps;
  std::string maps_pgm;
  auto* c_maps = app.add_subcommand("maps", "Descriptor maps of a mask");
  c_maps->add_option("--mask", maps.mask, "Binary mask PGM")->required();
  c_maps->add_option("--order", maps.order, "Number of harmonics N");
  c_maps->add_option("--out", maps.out, "Output FDM file")->required();
  c_maps->add_option("--pgm-dir", maps_pgm, "Also write per-channel PGM visualisations here");

  SynthOptions synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  c_synth->add_option("--seed", synth.config.seed, "RNG seed");
  c_synth->add_option("--groups", synth.config.groups, "Number of eyes (split 15:5:10)");
  c_synth->add_option("--images-per-group", synth.config.images_per_group, "B-scans per eye");
  c_synth->add_option("--height", synth.config.height, "Image height");
  c_synth->add_option("--width", synth.config.width, "Image width");
  c_synth->add_option("--noise", synth.config.noise, "Speckle standard deviation");
  c_synth->add_option("--out", synth.out, "Output directory")->required();

  TrainOptions train_opts;
  std::string train_config;
  std::uint64_t train_seed = 0;
  auto* c_train = app.add_subcommand("train", "Train a model on a synthetic dataset");
  c_train->add_option("--config", train_config, "key=value config");
  c_train->add_option("--data", train_opts.data, "Dataset directory")->required();
  c_train->add_option("--out", train_opts.out, "Output directory")->required();
  auto* train_seed_opt = c_train->add_option("--seed", train_seed, "Seed (overrides config)");
  c_train->add_flag("--verbose", train_opts.verbose, "Log every epoch");

  PredictOptions pred;
  auto* c_pred = app.add_subcommand("predict", "Segment images with a trained checkpoint");
  c_pred->add_option("--checkpoint", pred.checkpoint, "FNCK checkpoint")->required();
  c_pred->add_option("--input", pred.input, "Image PGM or directory")->required();
  c_pred->add_option("--out", pred.out, "Output directory")->required();

  EvalOptions eval;
  std::string eval_grid;
  auto* c_eval = app.add_subcommand("eval", "Score predicted masks against references");
  c_eval->add_option("--pred", eval.predictions, "Directory of predicted masks")->required();
  c_eval->add_option("--ref", eval.references, "Directory of reference masks")->required();
  c_eval->add_option("--grid", eval_grid, "ETDRS grid key=value config");
  c_eval->add_option("--out", eval.out, "Output CSV")->required();

  SweepOptions sweep;
  std::string sweep_config;
  auto* c_sweep = app.add_subcommand("sweep-n", "Train over several descriptor orders and seeds");
  c_sweep->add_option("--config", sweep_config, "key=value config");
  c_sweep->add_option("--data", sweep.data, "Dataset directory")->required();
  c_sweep->add_option("--n", sweep.orders, "Descriptor orders")->delimiter(',');
  c_sweep->add_option("--seed", sweep.seed, "First seed; runs use seed, seed+1, ...");
  c_sweep->add_option("--runs", sweep.runs, "Runs per N");
  c_sweep->add_option("--out", sweep.out, "Output CSV")->required();
  c_sweep->add_flag("--verbose", sweep.verbose, "Log every run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (c_desc->parsed()) {
      cmd_descriptors(desc);
    } else if (c_maps->parsed()) {
      if (!maps_pgm.empty()) maps.pgm_dir = maps_pgm;
      cmd_maps(maps);
    } else if (c_synth->parsed()) {
      cmd_synth(synth);
    } else if (c_train->parsed()) {
      if (!train_config.empty()) train_opts.config = train_config;
      if (train_seed_opt->count()) train_opts.seed = train_seed;
      cmd_train(train_opts);
    } else if (c_pred->parsed()) {
      cmd_predict(pred);
    } else if (c_eval->parsed()) {
      if (!eval_grid.empty()) eval.grid_config = eval_grid;
      cmd_eval(eval);
    } else if (c_sweep->parsed()) {
      if (!sweep_config.empty()) sweep.config = sweep_config;
      cmd_sweep_n(sweep);
    }
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::cerr << "error: " << msg << '\n';
    return 1;
  }
  return 0;
}

}  // namespace fouriernet::cli
