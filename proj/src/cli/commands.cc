// cli/commands.cc

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

#include <algorithm>
#include <fstream>
#include <random>
#include <string>

#include "CLI11.hpp"

#include "convbss/cli.h"
#include "convbss/error.h"
#include "convbss/evaluation.h"
#include "convbss/pipeline.h"
#include "convbss/reconstruction.h"

namespace convbss {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Keeps mixing and coloring draws independent of the innovation stream.
constexpr std::uint64_t kFilterSeedSalt = 0x9E3779B97F4A7C15ULL;

json MatrixToJson(const Matrix &m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json VectorToJson(const Vector &v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

void WriteJson(const fs::path &path, const json &j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write to " + path.string() + " failed");
}

json ReadJson(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error &e) {
    throw IoError(path.string() + " is not valid JSON: " + e.what());
  }
}

void PrepareOutDir(const fs::path &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw IoError("cannot create output directory " + dir.string());
}

fs::path SignalPath(const RunConfig &config, const std::string &stem) {
  return config.out_dir / (stem + Extension(config.format));
}

void WriteSignal(const RunConfig &config, const std::string &stem,
                 const MultichannelSignal &signal,
                 const std::vector<std::string> &names) {
  const fs::path path = SignalPath(config, stem);
  if (config.format == SignalFormat::kWav)
    write_wav(path, signal, config.wav_encoding);
  else
    write_csv(path, signal, names);
}

MultichannelSignal ReadInput(const fs::path &path, const char *what) {
  if (path.empty()) throw InvalidArgumentError(std::string("no ") + what + " file given");
  if (!fs::exists(path))
    throw IoError(std::string(what) + " file not found: " + path.string());
  return read_signal(path);
}

MultichannelSignal SelectChannels(const MultichannelSignal &signal,
                                  const std::vector<Eigen::Index> &channels) {
  if (channels.empty()) return signal;
  Matrix picked(static_cast<Eigen::Index>(channels.size()), signal.length());
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i] >= signal.channels())
      throw DimensionError("channel " + std::to_string(channels[i]) +
                           " requested but the signal has " +
                           std::to_string(signal.channels()));
    picked.row(static_cast<Eigen::Index>(i)) = signal.samples().row(channels[i]);
  }
  return MultichannelSignal(std::move(picked), signal.sample_rate());
}

std::vector<std::string> Names(const std::string &prefix, Eigen::Index count) {
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < count; ++i) names.push_back(prefix + std::to_string(i));
  return names;
}

std::vector<std::string> PairNames(const std::string &a, Eigen::Index m,
                                   const std::string &b, Eigen::Index n) {
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      names.push_back(a + std::to_string(i) + "_" + b + std::to_string(j));
  return names;
}

void WarnIfUnderdetermined(const RunConfig &config, Eigen::Index m,
                           Eigen::Index n, std::ostream &log) {
  if (config.underdetermined_guard && m > n)
    log << "warning: " << m << " sources requested from " << n
        << " observations (underdetermined); separation is not expected to "
           "succeed\n";
}

// The separating model written by `separate`, or nothing when no model
// file exists where one is expected.
std::optional<json> FindModel(const RunConfig &config) {
  fs::path path = config.model;
  if (path.empty()) {
    if (config.outputs.empty()) return std::nullopt;
    path = config.outputs.parent_path() / "model.json";
    if (!fs::exists(path)) return std::nullopt;
  }
  return ReadJson(path);
}

Eigen::Index FrameOffset(const std::optional<json> &model) {
  return model ? model->at("frame_offset").get<Eigen::Index>() : 0;
}

json ReportToJson(const SeparationModel &model) {
  json rows = json::array();
  for (std::size_t i = 0; i < model.reports.size(); ++i) {
    const RowReport &r = model.reports[i];
    rows.push_back({{"row", i},
                    {"iterations", r.iterations},
                    {"residual", r.residual},
                    {"converged", r.converged},
                    {"restarts", r.restarts},
                    {"damped", r.damped}});
  }
  return rows;
}

}  // namespace

SimulatedDataset simulate_dataset(const SimulationSpec &params, std::uint64_t seed) {
  const Eigen::Index m = params.sources, n = params.observations;
  std::mt19937_64 rng(seed ^ kFilterSeedSalt);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<std::vector<double>> coloring;
  if (params.coloring_filters) {
    coloring = *params.coloring_filters;
  } else {
    coloring.assign(m, std::vector<double>(params.coloring_length));
    for (auto &f : coloring)
      for (double &t : f) t = normal(rng);
  }
  MimoFirFilter::Taps taps;
  if (params.mixing_taps) {
    taps = *params.mixing_taps;
  } else {
    taps.assign(n, std::vector<std::vector<double>>(
                       m, std::vector<double>(params.mixing_order)));
    for (auto &row : taps)
      for (auto &filter : row)
        for (double &t : filter) t = normal(rng);
  }
  MimoFirFilter mixing(taps);
  if (static_cast<Eigen::Index>(mixing.out_channels()) != n ||
      static_cast<Eigen::Index>(mixing.in_channels()) != m)
    throw DimensionError("mixing taps must be observations x sources x order");

  InnovationSpec innovation;
  innovation.distributions = params.distributions;
  if (innovation.distributions.size() == 1)
    innovation.distributions.assign(m, params.distributions.front());
  innovation.coloring_filters = coloring;
  innovation.seed = seed;
  GeneratedSources generated = generate_sources(innovation, params.length, m);

  Matrix images(m * n, params.length);
  for (Eigen::Index i = 0; i < m; ++i) {
    MimoFirFilter::Taps column(n, std::vector<std::vector<double>>(1));
    for (Eigen::Index j = 0; j < n; ++j) column[j][0] = taps[j][i];
    const MultichannelSignal single(generated.sources.samples().row(i));
    const MultichannelSignal image = apply_mimo_fir(MimoFirFilter(column), single);
    images.middleRows(i * n, n) = image.samples();
  }
  MultichannelSignal observations = apply_mimo_fir(mixing, generated.sources);
  if (params.sample_rate) {
    observations = MultichannelSignal(observations.samples(), params.sample_rate);
  }
  return SimulatedDataset{std::move(generated), std::move(mixing),
                          std::move(coloring), std::move(observations),
                          MultichannelSignal(std::move(images), params.sample_rate)};
}

int CmdSimulate(const RunConfig &config, std::ostream &log) {
  config.Validate();
  const SimulationSpec &params = config.simulation;
  WarnIfUnderdetermined(config, params.sources, params.observations, log);
  const SimulatedDataset data = simulate_dataset(params, config.separation.seed);
  PrepareOutDir(config.out_dir);

  const Eigen::Index m = params.sources, n = params.observations;
  auto with_rate = [&](const MultichannelSignal &s) {
    return MultichannelSignal(s.samples(), params.sample_rate);
  };
  WriteSignal(config, "innovations", with_rate(data.generated.innovations),
              Names("u", m));
  WriteSignal(config, "sources", with_rate(data.generated.sources), Names("s", m));
  WriteSignal(config, "observations", data.observations, Names("x", n));
  WriteSignal(config, "images", data.images, PairNames("s", m, "x", n));

  json filters;
  filters["schema_version"] = kSchemaVersion;
  filters["mixing_taps"] = data.mixing.taps();
  filters["coloring_filters"] = data.coloring_filters;
  filters["coloring_delay"] = (params.coloring_length - 1) / 2;
  WriteJson(config.out_dir / "filters.json", filters);
  SaveRunConfig(config.out_dir / "run_config.json", config);
  log << "simulated " << m << " sources into " << n << " observations of "
      << params.length << " samples in " << config.out_dir.string() << '\n';
  return kExitOk;
}

int CmdSeparate(const RunConfig &config, std::ostream &log) {
  config.Validate();
  const MultichannelSignal observations =
      SelectChannels(ReadInput(config.observations, "observations"), config.channels);
  const Eigen::Index n = observations.channels();
  const Eigen::Index m = config.sources.value_or(n);
  WarnIfUnderdetermined(config, m, n, log);
  PrepareOutDir(config.out_dir);
  SaveRunConfig(config.out_dir / "run_config.json", config);

  json report;
  report["schema_version"] = kSchemaVersion;
  report["mode"] = ToString(config.separation.mode);
  report["rank_threshold"] = config.separation.rank_threshold;
  report["tol"] = config.separation.tol;
  report["max_iter"] = config.separation.max_iter;

  std::optional<SeparationResult> separated;
  try {
    separated.emplace(separate_observations(observations, config.separation, m));
  } catch (const ExtractionFailure &e) {
    report["converged"] = false;
    report["rows"] = json::array();
    report["failure"] = {{"row", e.row()}, {"message", e.what()}};
    WriteJson(config.out_dir / "report.json", report);
    log << "error: " << e.what() << '\n';
    return kExitConvergence;
  }

  const SeparationResult &result = *separated;
  const SeparationModel &model = result.model;
  WriteSignal(config, "outputs",
              MultichannelSignal(result.outputs.samples(), observations.sample_rate()),
              Names("y", m));

  json model_json;
  model_json["schema_version"] = kSchemaVersion;
  model_json["sources"] = m;
  model_json["observations"] = n;
  model_json["frame_offset"] = result.frame_offset;
  model_json["config"] = ToJson(model.config);
  model_json["W"] = MatrixToJson(model.W);
  model_json["whitening"] = {{"mean", VectorToJson(result.whitening.mean)},
                             {"transform", MatrixToJson(result.whitening.transform)},
                             {"eigenvalues", VectorToJson(result.whitening.eigenvalues)},
                             {"clamped", result.whitening.clamped}};
  WriteJson(config.out_dir / "model.json", model_json);

  report["converged"] = model.converged();
  report["rows"] = ReportToJson(model);
  WriteJson(config.out_dir / "report.json", report);

  for (std::size_t i = 0; i < model.reports.size(); ++i) {
    const RowReport &r = model.reports[i];
    log << "row " << i << ": " << (r.converged ? "converged" : "NOT converged")
        << " after " << r.iterations << " iterations (residual " << r.residual
        << ")\n";
  }
  if (!model.converged()) {
    log << "error: separation did not converge within " << config.separation.max_iter
        << " iterations\n";
    return kExitConvergence;
  }
  return kExitOk;
}

int CmdReconstruct(const RunConfig &config, std::ostream &log) {
  config.Validate();
  const MultichannelSignal outputs = ReadInput(config.outputs, "outputs");
  const MultichannelSignal raw =
      SelectChannels(ReadInput(config.observations, "observations"), config.channels);
  const Eigen::Index offset = FrameOffset(FindModel(config));
  if (offset > raw.length())
    throw DimensionError("frame offset exceeds the observation length");
  const MultichannelSignal observations = crop_front(raw, offset);
  const Eigen::Index half_width = config.separation.effective_lag_window();
  const ContributionSet set = reconstruct_all(outputs, observations, half_width);

  const Eigen::Index m = set.sources(), n = set.observations();
  Matrix contributions(m * n, outputs.length());
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      contributions.row(i * n + j) = set.contributions[i][j].transpose();
  PrepareOutDir(config.out_dir);
  WriteSignal(config, "contributions",
              MultichannelSignal(std::move(contributions), raw.sample_rate()),
              PairNames("y", m, "x", n));

  // Relative error of the summed contributions against each observation.
  json sum_error = json::array();
  for (Eigen::Index j = 0; j < n; ++j) {
    Vector total = Vector::Zero(outputs.length());
    for (Eigen::Index i = 0; i < m; ++i) total += set.contributions[i][j];
    const Vector x = observations.samples().row(j).transpose();
    const double norm = x.norm();
    sum_error.push_back(norm > 0.0 ? (total - x).norm() / norm : 0.0);
  }
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["half_width"] = half_width;
  doc["frame_offset"] = offset;
  doc["residual"] = MatrixToJson(set.residual);
  doc["sum_relative_error"] = sum_error;
  WriteJson(config.out_dir / "reconstruction.json", doc);

  std::ofstream table(config.out_dir / "residuals.csv");
  if (!table) throw IoError("cannot write residuals.csv");
  table << "output";
  for (Eigen::Index j = 0; j < n; ++j) table << ",x" << j;
  table << '\n';
  for (Eigen::Index i = 0; i < m; ++i) {
    table << 'y' << i;
    for (Eigen::Index j = 0; j < n; ++j) table << ',' << set.residual(i, j);
    table << '\n';
  }
  SaveRunConfig(config.out_dir / "run_config.json", config);
  log << "reconstructed " << m << "x" << n << " contributions (L = " << half_width
      << ")\n";
  return kExitOk;
}

int CmdEvaluate(const RunConfig &config, std::ostream &log) {
  config.Validate();
  const MultichannelSignal outputs = ReadInput(config.outputs, "outputs");
  MultichannelSignal truth = ReadInput(config.truth, "truth");
  Eigen::Index offset = FrameOffset(FindModel(config));
  if (offset == 0 && truth.length() > outputs.length())
    offset = truth.length() - outputs.length();
  if (offset > truth.length())
    throw DimensionError("frame offset exceeds the truth length");
  truth = crop_front(truth, offset);

  const Eigen::Index half_width = config.separation.effective_lag_window();
  const Eigen::Index max_lag = config.max_lag.value_or(half_width);
  const MatchReport match = match_sources(outputs, truth, max_lag);

  json per_source = json::array();
  for (std::size_t j = 0; j < match.per_source.size(); ++j) {
    const SourceMatch &s = match.per_source[j];
    per_source.push_back({{"truth", j},
                          {"output", s.output},
                          {"lag", s.lag},
                          {"correlation", s.correlation},
                          {"sign", s.sign},
                          {"sir_db", s.sir_db}});
  }
  json report;
  report["schema_version"] = kSchemaVersion;
  report["sources"] = outputs.channels();
  report["max_lag"] = max_lag;
  report["frame_offset"] = offset;
  report["permutation"] = match.permutation();
  report["per_source"] = per_source;
  report["min_correlation"] = match.min_correlation();
  report["diagonalization_error"] =
      outputs.channels() >= 2 ? json(diagonalization_error(outputs, half_width))
                              : json(nullptr);
  report["half_width"] = half_width;
  PrepareOutDir(config.out_dir);
  WriteJson(config.out_dir / "evaluation.json", report);

  // Plot series: ground truth, raw outputs, and each matched output undone
  // of its sign, delay and scale so it overlays its source.
  const fs::path figures = config.out_dir / "figures";
  PrepareOutDir(figures);
  const Eigen::Index m = outputs.channels();
  const Eigen::Index len = std::min(outputs.length(), truth.length());
  Matrix aligned = Matrix::Zero(m, len);
  for (Eigen::Index j = 0; j < m; ++j) {
    const SourceMatch &s = match.per_source[j];
    for (Eigen::Index k = 0; k < len; ++k) {
      const Eigen::Index src = k + s.lag;
      if (src >= 0 && src < outputs.length())
        aligned(j, k) = s.sign * outputs.samples()(s.output, src);
    }
    const double energy = aligned.row(j).squaredNorm();
    if (energy > 0.0)
      aligned.row(j) *= aligned.row(j).dot(truth.samples().row(j).head(len)) / energy;
  }
  write_csv(figures / "truth.csv", truth, Names("s", truth.channels()));
  write_csv(figures / "outputs.csv", outputs, Names("y", m));
  write_csv(figures / "aligned.csv", MultichannelSignal(std::move(aligned)),
            Names("s_hat", m));
  SaveRunConfig(config.out_dir / "run_config.json", config);

  for (std::size_t j = 0; j < match.per_source.size(); ++j) {
    const SourceMatch &s = match.per_source[j];
    log << "source " << j << " <- output " << s.output << ": |corr| "
        << s.correlation << ", lag " << s.lag << ", SIR " << s.sir_db << " dB\n";
  }
  return kExitOk;
}

int RunCli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Convolutive blind source separation by constrained fixed-point ICA"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "convbss 1.0.0");

  // Flags shared by every command; unset ones leave the config untouched.
  struct Flags {
    std::string config, mode, nonlinearity, out, format, stop_norm;
    std::optional<Eigen::Index> embed_order, lag_window, sources, max_lag;
    std::optional<Eigen::Index> length, observations_count, mixing_order;
    std::optional<double> alpha, tol;
    std::optional<int> max_iter;
    std::optional<std::uint64_t> seed;
    std::vector<Eigen::Index> channels;
    std::string observations, outputs, truth, model;
    bool allow_underdetermined = false;
  } f;

  auto add_common = [&](CLI::App *cmd) {
    cmd->add_option("--config", f.config, "JSON run configuration")
        ->check(CLI::ExistingFile);
    cmd->add_option("--mode", f.mode, "deflation or symmetric")
        ->check(CLI::IsMember({"deflation", "symmetric"}));
    cmd->add_option("--embed-order", f.embed_order, "embedding order Q");
    cmd->add_option("--lag-window", f.lag_window, "correlation half-window L");
    cmd->add_option("--alpha", f.alpha, "effective-rank energy threshold");
    cmd->add_option("--tol", f.tol, "convergence tolerance");
    cmd->add_option("--max-iter", f.max_iter, "iterations per row or sweeps");
    cmd->add_option("--nonlinearity", f.nonlinearity, "pow3, tanh or gauss")
        ->check(CLI::IsMember({"pow3", "tanh", "gauss"}));
    cmd->add_option("--stop-norm", f.stop_norm, "spectral or max-abs")
        ->check(CLI::IsMember({"spectral", "max-abs"}));
    cmd->add_option("--seed", f.seed, "random seed");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--format", f.format, "signal file format")
        ->check(CLI::IsMember({"wav", "csv"}));
  };

  CLI::App *simulate = app.add_subcommand("simulate", "write a synthetic convolutive mixture");
  add_common(simulate);
  simulate->add_option("--sources", f.sources, "number of sources m");
  simulate->add_option("--observations", f.observations_count, "number of observations n");
  simulate->add_option("--length", f.length, "samples per channel N");
  simulate->add_option("--mixing-order", f.mixing_order, "mixing filter order P");
  simulate->add_flag("--allow-underdetermined", f.allow_underdetermined,
                     "suppress the m > n warning");

  CLI::App *separate = app.add_subcommand("separate", "separate observed mixtures");
  add_common(separate);
  separate->add_option("observations", f.observations, "observation signal file");
  separate->add_option("--sources", f.sources, "number of outputs m");
  separate->add_option("--channels", f.channels, "observation channels to use");
  separate->add_flag("--allow-underdetermined", f.allow_underdetermined,
                     "suppress the m > n warning");

  CLI::App *reconstruct =
      app.add_subcommand("reconstruct", "regress each output onto each observation");
  add_common(reconstruct);
  reconstruct->add_option("outputs", f.outputs, "separated output signal file");
  reconstruct->add_option("observations", f.observations, "observation signal file");
  reconstruct->add_option("--model", f.model, "model.json written by separate");
  reconstruct->add_option("--channels", f.channels, "observation channels to use");

  CLI::App *evaluate = app.add_subcommand("evaluate", "score outputs against ground truth");
  add_common(evaluate);
  evaluate->add_option("outputs", f.outputs, "separated output signal file");
  evaluate->add_option("truth", f.truth, "ground-truth source signal file");
  evaluate->add_option("--model", f.model, "model.json written by separate");
  evaluate->add_option("--max-lag", f.max_lag, "largest lag searched when matching");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return kExitOk;
  } catch (const CLI::CallForVersion &e) {
    out << e.what() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    RunConfig config = f.config.empty() ? RunConfig{} : LoadRunConfig(f.config);
    SeparationConfig &sep = config.separation;
    if (!f.mode.empty()) sep.mode = SeparationModeFromString(f.mode);
    if (!f.nonlinearity.empty()) sep.nonlinearity = NonlinearityFromString(f.nonlinearity);
    if (!f.stop_norm.empty()) sep.stop_norm = StopNormFromString(f.stop_norm);
    if (f.embed_order) sep.embed_order = *f.embed_order;
    if (f.lag_window) sep.lag_window = *f.lag_window;
    if (f.alpha) sep.rank_threshold = *f.alpha;
    if (f.tol) sep.tol = *f.tol;
    if (f.max_iter) sep.max_iter = *f.max_iter;
    if (f.seed) sep.seed = *f.seed;
    if (!f.out.empty()) config.out_dir = f.out;
    if (!f.format.empty()) config.format = SignalFormatFromString(f.format);
    if (!f.observations.empty()) config.observations = f.observations;
    if (!f.outputs.empty()) config.outputs = f.outputs;
    if (!f.truth.empty()) config.truth = f.truth;
    if (!f.model.empty()) config.model = f.model;
    if (!f.channels.empty()) config.channels = f.channels;
    if (f.max_lag) config.max_lag = *f.max_lag;
    if (f.allow_underdetermined) config.underdetermined_guard = false;

    if (simulate->parsed()) {
      SimulationSpec &params = config.simulation;
      if (f.sources) params.sources = *f.sources;
      if (f.observations_count) params.observations = *f.observations_count;
      if (f.length) params.length = *f.length;
      if (f.mixing_order) params.mixing_order = *f.mixing_order;
      return CmdSimulate(config, err);
    }
    if (f.sources) config.sources = *f.sources;
    if (separate->parsed()) return CmdSeparate(config, err);
    if (reconstruct->parsed()) return CmdReconstruct(config, err);
    return CmdEvaluate(config, err);
  } catch (const ExtractionFailure &e) {
    err << "error: " << e.what() << '\n';
    return kExitConvergence;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace convbss
