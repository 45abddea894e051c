// convbss/cli.h

// Copyright 2026 The convbss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// File-driven front end: simulate, separate, reconstruct, evaluate.
//
// Every command is described by one RunConfig. Values come from built-in
// defaults, then an optional JSON config file, then command-line flags.
// The resolved config is written next to the command's outputs as
// run_config.json and reloads to the same value.

#ifndef CONVBSS_CLI_H_
#define CONVBSS_CLI_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "convbss/io.h"
#include "convbss/separation.h"

namespace convbss {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitConvergence = 2;

/// Version stamped into every JSON document the tool writes.
inline constexpr int kSchemaVersion = 1;

/// Parameters of the synthetic dataset written by `simulate`.
struct SimulationSpec {
  Eigen::Index sources = 2;       // m
  Eigen::Index observations = 2;  // n
  Eigen::Index length = 20000;    // N
  Eigen::Index mixing_order = 3;  // P
  /// Coloring filter length 2R - 1 (odd). 1 leaves innovations white.
  Eigen::Index coloring_length = 3;
  std::vector<Distribution> distributions{Distribution::kUniform,
                                          Distribution::kLaplacian};
  /// Explicit mixing taps [n][m][P]; drawn from the seed when absent.
  std::optional<MimoFirFilter::Taps> mixing_taps;
  /// Explicit coloring filters, one per source; drawn when absent.
  std::optional<std::vector<std::vector<double>>> coloring_filters;
  std::optional<double> sample_rate;
};

struct RunConfig {
  SeparationConfig separation;
  SimulationSpec simulation;

  /// Number of outputs for `separate`; defaults to the observation count.
  std::optional<Eigen::Index> sources;
  /// Observation channels to use (zero-based); all when empty.
  std::vector<Eigen::Index> channels;

  std::filesystem::path observations;  // separate, reconstruct
  std::filesystem::path outputs;       // reconstruct, evaluate
  std::filesystem::path truth;         // evaluate
  /// model.json from `separate`; looked up next to `outputs` when empty.
  std::filesystem::path model;
  std::filesystem::path out_dir = ".";

  SignalFormat format = SignalFormat::kCsv;
  WavEncoding wav_encoding = WavEncoding::kFloat32;
  /// Maximum lag searched by `evaluate`; defaults to the lag window.
  std::optional<Eigen::Index> max_lag;
  /// Warn when more sources than observations are requested.
  bool underdetermined_guard = true;

  /// Throws InvalidArgumentError on out-of-domain fields.
  void Validate() const;
};

/// Everything `simulate` writes, available in memory.
struct SimulatedDataset {
  GeneratedSources generated;
  MimoFirFilter mixing;
  std::vector<std::vector<double>> coloring_filters;
  MultichannelSignal observations;
  /// Channel i * n + j is source i as it appears in observation j.
  MultichannelSignal images;
};

/// Deterministic in `seed`: innovations, coloring and mixing all derive
/// from it.
SimulatedDataset simulate_dataset(const SimulationSpec &params, std::uint64_t seed);

nlohmann::json ToJson(const SeparationConfig &config);
SeparationConfig SeparationConfigFromJson(const nlohmann::json &j);
nlohmann::json ToJson(const RunConfig &config);
/// Missing keys keep their defaults; unknown keys are rejected.
RunConfig RunConfigFromJson(const nlohmann::json &j);
RunConfig LoadRunConfig(const std::filesystem::path &path);
void SaveRunConfig(const std::filesystem::path &path, const RunConfig &config);

/// Each command returns an exit code and reports progress and warnings
/// on `log`. Failures other than non-convergence are thrown.
int CmdSimulate(const RunConfig &config, std::ostream &log);
int CmdSeparate(const RunConfig &config, std::ostream &log);
int CmdReconstruct(const RunConfig &config, std::ostream &log);
int CmdEvaluate(const RunConfig &config, std::ostream &log);

/// Parses argv, runs the chosen command, and maps errors to exit codes:
/// 0 success, 1 usage or I/O, 2 convergence failure.
int RunCli(int argc, const char *const *argv, std::ostream &out,
           std::ostream &err);

}  // namespace convbss

#endif  // CONVBSS_CLI_H_
