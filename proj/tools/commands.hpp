#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fouriernet/experiment.hpp"

namespace fouriernet::cli {

namespace fs = std::filesystem;

inline constexpr const char* kToolVersion = "1.0.0";

// Written atomically (temp file + rename) as <dir>/run_manifest.json.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> outputs;
  std::uint64_t seed = 0;
  double duration_seconds = 0.0;
};

void write_manifest(const fs::path& dir, const RunManifest& manifest);

struct DescriptorsOptions {
  fs::path mask;
  int order = 1;
  fs::path out;  // CSV file
};
// One CSV block per 8-connected component (component_id = label).
void cmd_descriptors(const DescriptorsOptions& options);

struct MapsOptions {
  fs::path mask;
  int order = 1;
  fs::path out;  // FDM file
  std::optional<fs::path> pgm_dir;
};
void cmd_maps(const MapsOptions& options);

struct SynthOptions {
  SynthConfig config;
  fs::path out;
};
void cmd_synth(const SynthOptions& options);

struct TrainOptions {
  std::optional<fs::path> config;
  fs::path data;
  fs::path out;
  std::optional<std::uint64_t> seed;  // overrides the config seed
  bool verbose = false;
};
// Writes checkpoint.fnck, history.csv and test_metrics.csv.
void cmd_train(const TrainOptions& options);

struct PredictOptions {
  fs::path checkpoint;
  fs::path input;  // a PGM image or a directory of them
  fs::path out;
};
// Per image: <stem>_mask.pgm, <stem>_posterior.pgm and, with descriptors,
// <stem>.fdm.
void cmd_predict(const PredictOptions& options);

struct EvalOptions {
  fs::path predictions;
  fs::path references;
  std::optional<fs::path> grid_config;
  fs::path out;  // CSV file; a text table goes next to it
};
void cmd_eval(const EvalOptions& options);

struct SweepOptions {
  std::optional<fs::path> config;
  fs::path data;
  std::vector<int> orders{1, 2, 3};
  std::uint64_t seed = 0;
  int runs = 3;
  fs::path out;  // CSV file
  bool verbose = false;
};
std::vector<SweepRow> cmd_sweep_n(const SweepOptions& options);

// Parses argv and dispatches; returns the process exit code. Errors print a
// single line to stderr.
int run(int argc, char** argv);

}  // namespace fouriernet::cli
