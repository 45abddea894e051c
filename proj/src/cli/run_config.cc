// cli/run_config.cc

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

#include <fstream>
#include <set>
#include <string>

#include "convbss/cli.h"
#include "convbss/error.h"

namespace convbss {

using nlohmann::json;

namespace {

void RejectUnknownKeys(const json &j, const std::set<std::string> &known,
                       const std::string &where) {
  if (!j.is_object()) throw InvalidArgumentError(where + " must be an object");
  for (const auto &[key, value] : j.items())
    if (!known.count(key))
      throw InvalidArgumentError("unknown key '" + key + "' in " + where);
}

template <typename T>
void ReadIfPresent(const json &j, const char *key, T &out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

template <typename T>
void ReadOptional(const json &j, const char *key, std::optional<T> &out) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null())
    out.reset();
  else
    out = j.at(key).get<T>();
}

template <typename T>
json OptionalToJson(const std::optional<T> &v) {
  return v ? json(*v) : json(nullptr);
}

std::string EncodingName(WavEncoding e) {
  switch (e) {
    case WavEncoding::kPcm16: return "pcm16";
    case WavEncoding::kPcm24: return "pcm24";
    case WavEncoding::kFloat32: return "float32";
  }
  return "float32";
}

WavEncoding EncodingFromName(const std::string &name) {
  if (name == "pcm16") return WavEncoding::kPcm16;
  if (name == "pcm24") return WavEncoding::kPcm24;
  if (name == "float32") return WavEncoding::kFloat32;
  throw InvalidArgumentError("unknown WAV encoding '" + name + "'");
}

json ToJson(const SimulationSpec &s) {
  json dists = json::array();
  for (Distribution d : s.distributions) dists.push_back(ToString(d));
  json j;
  j["sources"] = s.sources;
  j["observations"] = s.observations;
  j["length"] = s.length;
  j["mixing_order"] = s.mixing_order;
  j["coloring_length"] = s.coloring_length;
  j["distributions"] = dists;
  j["mixing_taps"] = OptionalToJson(s.mixing_taps);
  j["coloring_filters"] = OptionalToJson(s.coloring_filters);
  j["sample_rate"] = OptionalToJson(s.sample_rate);
  return j;
}

SimulationSpec SimulationSpecFromJson(const json &j) {
  RejectUnknownKeys(j,
                    {"sources", "observations", "length", "mixing_order",
                     "coloring_length", "distributions", "mixing_taps",
                     "coloring_filters", "sample_rate"},
                    "simulation");
  SimulationSpec s;
  ReadIfPresent(j, "sources", s.sources);
  ReadIfPresent(j, "observations", s.observations);
  ReadIfPresent(j, "length", s.length);
  ReadIfPresent(j, "mixing_order", s.mixing_order);
  ReadIfPresent(j, "coloring_length", s.coloring_length);
  if (j.contains("distributions")) {
    s.distributions.clear();
    for (const json &d : j.at("distributions"))
      s.distributions.push_back(DistributionFromString(d.get<std::string>()));
  }
  ReadOptional(j, "mixing_taps", s.mixing_taps);
  ReadOptional(j, "coloring_filters", s.coloring_filters);
  ReadOptional(j, "sample_rate", s.sample_rate);
  return s;
}

}  // namespace

json ToJson(const SeparationConfig &c) {
  json j;
  j["embed_order"] = c.embed_order;
  j["lag_window"] = OptionalToJson(c.lag_window);
  j["rank_threshold"] = c.rank_threshold;
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  j["mode"] = ToString(c.mode);
  j["nonlinearity"] = ToString(c.nonlinearity);
  j["seed"] = c.seed;
  j["stop_norm"] = ToString(c.stop_norm);
  j["max_restarts"] = c.max_restarts;
  j["damping_window"] = c.damping_window;
  return j;
}

SeparationConfig SeparationConfigFromJson(const json &j) {
  RejectUnknownKeys(j,
                    {"embed_order", "lag_window", "rank_threshold", "tol",
                     "max_iter", "mode", "nonlinearity", "seed", "stop_norm",
                     "max_restarts", "damping_window"},
                    "separation");
  SeparationConfig c;
  ReadIfPresent(j, "embed_order", c.embed_order);
  ReadOptional(j, "lag_window", c.lag_window);
  ReadIfPresent(j, "rank_threshold", c.rank_threshold);
  ReadIfPresent(j, "tol", c.tol);
  ReadIfPresent(j, "max_iter", c.max_iter);
  if (j.contains("mode"))
    c.mode = SeparationModeFromString(j.at("mode").get<std::string>());
  if (j.contains("nonlinearity"))
    c.nonlinearity = NonlinearityFromString(j.at("nonlinearity").get<std::string>());
  ReadIfPresent(j, "seed", c.seed);
  if (j.contains("stop_norm"))
    c.stop_norm = StopNormFromString(j.at("stop_norm").get<std::string>());
  ReadIfPresent(j, "max_restarts", c.max_restarts);
  ReadIfPresent(j, "damping_window", c.damping_window);
  return c;
}

json ToJson(const RunConfig &c) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["separation"] = ToJson(c.separation);
  j["simulation"] = ToJson(c.simulation);
  j["sources"] = OptionalToJson(c.sources);
  j["channels"] = c.channels;
  j["observations"] = c.observations.generic_string();
  j["outputs"] = c.outputs.generic_string();
  j["truth"] = c.truth.generic_string();
  j["model"] = c.model.generic_string();
  j["out_dir"] = c.out_dir.generic_string();
  j["format"] = ToString(c.format);
  j["wav_encoding"] = EncodingName(c.wav_encoding);
  j["max_lag"] = OptionalToJson(c.max_lag);
  j["underdetermined_guard"] = c.underdetermined_guard;
  return j;
}

RunConfig RunConfigFromJson(const json &j) {
  RejectUnknownKeys(j,
                    {"schema_version", "separation", "simulation", "sources",
                     "channels", "observations", "outputs", "truth", "model",
                     "out_dir", "format", "wav_encoding", "max_lag",
                     "underdetermined_guard"},
                    "run config");
  if (j.contains("schema_version") &&
      j.at("schema_version").get<int>() != kSchemaVersion)
    throw InvalidArgumentError("unsupported config schema_version " +
                               j.at("schema_version").dump());
  RunConfig c;
  if (j.contains("separation"))
    c.separation = SeparationConfigFromJson(j.at("separation"));
  if (j.contains("simulation"))
    c.simulation = SimulationSpecFromJson(j.at("simulation"));
  ReadOptional(j, "sources", c.sources);
  ReadIfPresent(j, "channels", c.channels);
  auto read_path = [&](const char *key, std::filesystem::path &out) {
    if (j.contains(key)) out = j.at(key).get<std::string>();
  };
  read_path("observations", c.observations);
  read_path("outputs", c.outputs);
  read_path("truth", c.truth);
  read_path("model", c.model);
  read_path("out_dir", c.out_dir);
  if (j.contains("format"))
    c.format = SignalFormatFromString(j.at("format").get<std::string>());
  if (j.contains("wav_encoding"))
    c.wav_encoding = EncodingFromName(j.at("wav_encoding").get<std::string>());
  ReadOptional(j, "max_lag", c.max_lag);
  ReadIfPresent(j, "underdetermined_guard", c.underdetermined_guard);
  return c;
}

void RunConfig::Validate() const {
  separation.Validate();
  if (sources && *sources < 1)
    throw InvalidArgumentError("sources must be >= 1");
  for (Eigen::Index ch : channels)
    if (ch < 0) throw InvalidArgumentError("channel indices must be >= 0");
  if (max_lag && *max_lag < 0) throw InvalidArgumentError("max_lag must be >= 0");
  const SimulationSpec &s = simulation;
  if (s.sources < 1 || s.observations < 1)
    throw InvalidArgumentError("simulation needs at least one source and observation");
  if (s.mixing_order < 1) throw InvalidArgumentError("mixing order P must be >= 1");
  if (s.coloring_length < 1 || s.coloring_length % 2 == 0)
    throw InvalidArgumentError("coloring length must be odd and >= 1");
  if (s.distributions.size() != 1 &&
      static_cast<Eigen::Index>(s.distributions.size()) != s.sources)
    throw InvalidArgumentError("give one distribution, or one per source");
}

RunConfig LoadRunConfig(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error &e) {
    throw IoError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return RunConfigFromJson(j);
}

void SaveRunConfig(const std::filesystem::path &path, const RunConfig &config) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << ToJson(config).dump(2) << '\n';
}

}  // namespace convbss
