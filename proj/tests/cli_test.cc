// cli_test.cc

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
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "convbss/cli.h"
#include "convbss/pipeline.h"
#include "schema_check.h"
#include "test_support.h"

namespace convbss {
namespace {

using nlohmann::json;
using testing::MaxAbs;
using testing::TempDir;

struct CliResult {
  int code;
  std::string out, err;
};

CliResult Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "convbss");
  std::vector<const char *> argv;
  for (const std::string &a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string Slurp(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

json LoadJson(const std::filesystem::path &path) { return json::parse(Slurp(path)); }

std::string Str(const std::filesystem::path &p) { return p.string(); }

// A small dataset that separates quickly.
std::vector<std::string> SmallSimulation(const std::filesystem::path &out) {
  return {"simulate", "--seed", "3", "--length", "6000", "--out", Str(out)};
}

TEST(CliSimulateTest, WritesSignalsAndFiltersDeterministically) {
  TempDir dir("cli");
  ASSERT_EQ(Invoke(SmallSimulation(dir / "a")).code, 0);
  ASSERT_EQ(Invoke(SmallSimulation(dir / "b")).code, 0);
  for (const char *name : {"innovations.csv", "sources.csv", "observations.csv",
                           "images.csv", "filters.json"}) {
    ASSERT_TRUE(std::filesystem::exists(dir / "a" / name)) << name;
    EXPECT_EQ(Slurp(dir / "a" / name), Slurp(dir / "b" / name)) << name;
  }
  ASSERT_EQ(Invoke({"simulate", "--seed", "4", "--length", "6000", "--out", Str(dir / "c")}).code, 0);
  EXPECT_NE(Slurp(dir / "a" / "observations.csv"), Slurp(dir / "c" / "observations.csv"));
}

TEST(CliSimulateTest, ObservationsEqualOracleConvolution) {
  TempDir dir("cli");
  ASSERT_EQ(Invoke(SmallSimulation(dir.path())).code, 0);
  const json filters = LoadJson(dir / "filters.json");
  const auto taps = filters["mixing_taps"].get<MimoFirFilter::Taps>();
  const Matrix s = read_csv(dir / "sources.csv").signal.samples();
  const Matrix x = read_csv(dir / "observations.csv").signal.samples();
  EXPECT_LE(MaxAbs(x - testing::NaiveConvolution(taps, s)), 1e-12);
  // Source images add up to the observations.
  const Matrix images = read_csv(dir / "images.csv").signal.samples();
  EXPECT_LE(MaxAbs(images.row(0) + images.row(2) - x.row(0)), 1e-12);
  EXPECT_LE(MaxAbs(images.row(1) + images.row(3) - x.row(1)), 1e-12);
}

TEST(CliSimulateTest, WarnsWhenUnderdetermined) {
  TempDir dir("cli");
  json config = ToJson(RunConfig{});
  config["simulation"]["sources"] = 3;
  config["simulation"]["observations"] = 2;
  config["simulation"]["length"] = 2000;
  config["simulation"]["distributions"] = {"uniform", "laplacian", "bernoulli-sign"};
  std::ofstream(dir / "cfg.json") << config.dump();
  const CliResult r = Invoke({"simulate", "--config", Str(dir / "cfg.json"), "--out", Str(dir / "o")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("underdetermined"), std::string::npos);
  const CliResult quiet = Invoke({"simulate", "--config", Str(dir / "cfg.json"), "--out",
                               Str(dir / "q"), "--allow-underdetermined"});
  EXPECT_EQ(quiet.err.find("underdetermined"), std::string::npos);
}

TEST(CliSeparateTest, DefaultsAppliedAndRowsConverge) {
  TempDir dir("cli");
  ASSERT_EQ(Invoke(SmallSimulation(dir / "sim")).code, 0);
  const CliResult r = Invoke({"separate", Str(dir / "sim" / "observations.csv"), "--out",
                           Str(dir / "sep"), "--embed-order", "5", "--lag-window", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json report = LoadJson(dir / "sep" / "report.json");
  EXPECT_EQ(report["schema_version"], kSchemaVersion);
  EXPECT_EQ(report["tol"].get<double>(), 1e-7);
  EXPECT_EQ(report["rank_threshold"].get<double>(), 0.99995);
  EXPECT_TRUE(report["converged"].get<bool>());
  ASSERT_EQ(report["rows"].size(), 2u);
  for (const json &row : report["rows"]) EXPECT_TRUE(row["converged"].get<bool>());

  const json model = LoadJson(dir / "sep" / "model.json");
  EXPECT_EQ(model["frame_offset"], 4);
  EXPECT_EQ(model["W"].size(), 2u);
  EXPECT_EQ(model["W"][0].size(), 10u);
  EXPECT_EQ(model["whitening"]["transform"].size(), 10u);
  EXPECT_EQ(read_csv(dir / "sep" / "outputs.csv").signal.length(), 6000 - 4);
}

TEST(CliSeparateTest, MissingInputIsUsageError) {
  TempDir dir("cli");
  const CliResult r = Invoke({"separate", Str(dir / "nope.csv"), "--out", Str(dir / "o")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("not found"), std::string::npos);
}

TEST(CliSeparateTest, ExtractionFailureExitsTwoWithRow) {
  TempDir dir("cli");
  ASSERT_EQ(Invoke(SmallSimulation(dir / "sim")).code, 0);
  const CliResult r = Invoke({"separate", Str(dir / "sim" / "observations.csv"), "--out",
                           Str(dir / "sep"), "--embed-order", "1", "--lag-window", "1",
                           "--alpha", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("row 1"), std::string::npos) << r.err;
  const json report = LoadJson(dir / "sep" / "report.json");
  EXPECT_FALSE(report["converged"].get<bool>());
  EXPECT_EQ(report["failure"]["row"], 1);
}

TEST(CliSeparateTest, NonConvergenceExitsTwo) {
  TempDir dir("cli");
  ASSERT_EQ(Invoke(SmallSimulation(dir / "sim")).code, 0);
  const CliResult r = Invoke({"separate", Str(dir / "sim" / "observations.csv"), "--out",
                           Str(dir / "sep"), "--embed-order", "4", "--max-iter", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(LoadJson(dir / "sep" / "report.json")["converged"].get<bool>());
}

TEST(CliSeparateTest, RepeatedRunsAreByteIdentical) {
  TempDir dir("cli");
  ASSERT_EQ(Invoke(SmallSimulation(dir / "sim")).code, 0);
  for (const char *out : {"s1", "s2"})
    ASSERT_EQ(Invoke({"separate", Str(dir / "sim" / "observations.csv"), "--out", Str(dir / out),
                   "--embed-order", "5", "--lag-window", "4", "--seed", "11"})
                  .code,
              0);
  for (const char *name : {"outputs.csv", "model.json", "report.json"})
    EXPECT_EQ(Slurp(dir / "s1" / name), Slurp(dir / "s2" / name)) << name;
}

TEST(CliSeparateTest, FileChainMatchesInMemoryPipeline) {
  TempDir dir("cli");
  ASSERT_EQ(Invoke(SmallSimulation(dir / "sim")).code, 0);
  ASSERT_EQ(Invoke({"separate", Str(dir / "sim" / "observations.csv"), "--out", Str(dir / "sep"),
                 "--embed-order", "5", "--lag-window", "4", "--seed", "2"})
                .code,
            0);
  RunConfig config;
  config.simulation.length = 6000;
  const SimulatedDataset data = simulate_dataset(config.simulation, 3);
  SeparationConfig sep;
  sep.embed_order = 5;
  sep.lag_window = 4;
  sep.seed = 2;
  const SeparationResult mem = separate_observations(data.observations, sep, 2);
  const Matrix from_file = read_csv(dir / "sep" / "outputs.csv").signal.samples();
  EXPECT_LE(MaxAbs(from_file - mem.outputs.samples()), 1e-9);
}

TEST(CliReconstructTest, WritesContributionsAndResiduals) {
  TempDir dir("cli");
  ASSERT_EQ(Invoke(SmallSimulation(dir / "sim")).code, 0);
  ASSERT_EQ(Invoke({"separate", Str(dir / "sim" / "observations.csv"), "--out", Str(dir / "sep"),
                 "--embed-order", "5", "--lag-window", "4"})
                .code,
            0);
  const CliResult r = Invoke({"reconstruct", Str(dir / "sep" / "outputs.csv"),
                           Str(dir / "sim" / "observations.csv"), "--out", Str(dir / "rec"),
                           "--lag-window", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  const NamedSignal c = read_csv(dir / "rec" / "contributions.csv");
  EXPECT_EQ(c.signal.channels(), 4);
  EXPECT_EQ(c.names[1], "y0_x1");
  const json doc = LoadJson(dir / "rec" / "reconstruction.json");
  EXPECT_EQ(doc["frame_offset"], 4);
  EXPECT_EQ(doc["residual"].size(), 2u);
  EXPECT_TRUE(std::filesystem::exists(dir / "rec" / "residuals.csv"));
}

TEST(CliReconstructTest, ZeroLagWindowCompletes) {
  TempDir dir("cli");
  ASSERT_EQ(Invoke(SmallSimulation(dir / "sim")).code, 0);
  ASSERT_EQ(Invoke({"separate", Str(dir / "sim" / "observations.csv"), "--out", Str(dir / "sep"),
                 "--embed-order", "3", "--lag-window", "1"})
                .code,
            0);
  EXPECT_EQ(Invoke({"reconstruct", Str(dir / "sep" / "outputs.csv"),
                 Str(dir / "sim" / "observations.csv"), "--out", Str(dir / "rec"),
                 "--lag-window", "0"})
                .code,
            0);
}

TEST(CliReconstructTest, MismatchedLengthsAreUsageErrors) {
  TempDir dir("cli");
  ASSERT_EQ(Invoke(SmallSimulation(dir / "sim")).code, 0);
  // Without a model file the observations are not cropped, so a 6000-sample
  // observation cannot line up with 5990 output samples.
  write_csv(dir / "short.csv", MultichannelSignal(Matrix::Random(2, 5990)));
  const CliResult r = Invoke({"reconstruct", Str(dir / "short.csv"),
                           Str(dir / "sim" / "observations.csv"), "--out", Str(dir / "rec")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("aligned"), std::string::npos) << r.err;
}

TEST(CliEvaluateTest, SelfEvaluationAndSchema) {
  TempDir dir("cli");
  ASSERT_EQ(Invoke(SmallSimulation(dir / "sim")).code, 0);
  const std::string truth = Str(dir / "sim" / "innovations.csv");
  const CliResult r = Invoke({"evaluate", truth, truth, "--out", Str(dir / "ev")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json report = LoadJson(dir / "ev" / "evaluation.json");
  EXPECT_EQ(report["permutation"], json({0, 1}));
  for (const json &s : report["per_source"]) EXPECT_EQ(s["sir_db"].get<double>(), 99.0);
  const json schema = json::parse(Slurp(std::filesystem::path(CONVBSS_SOURCE_DIR) /
                                        "schemas" / "evaluation_report.schema.json"));
  const auto errors = testing::Validate(schema, report);
  EXPECT_TRUE(errors.empty()) << errors.front();
  for (const char *name : {"truth.csv", "outputs.csv", "aligned.csv"})
    EXPECT_TRUE(std::filesystem::exists(dir / "ev" / "figures" / name)) << name;
}

TEST(CliEvaluateTest, SchemaRejectsBrokenReports) {
  const json schema = json::parse(Slurp(std::filesystem::path(CONVBSS_SOURCE_DIR) /
                                        "schemas" / "evaluation_report.schema.json"));
  json bad = {{"schema_version", 1}, {"sources", 2}};
  EXPECT_FALSE(testing::Validate(schema, bad).empty());
}

TEST(CliEvaluateTest, SimulatedPipelineScoresWell) {
  TempDir dir("cli");
  ASSERT_EQ(Invoke({"simulate", "--seed", "1", "--out", Str(dir / "sim")}).code, 0);
  ASSERT_EQ(Invoke({"separate", Str(dir / "sim" / "observations.csv"), "--out", Str(dir / "sep"),
                 "--alpha", "0.99", "--seed", "1"})
                .code,
            0);
  const CliResult r = Invoke({"evaluate", Str(dir / "sep" / "outputs.csv"),
                           Str(dir / "sim" / "innovations.csv"), "--out", Str(dir / "ev")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json report = LoadJson(dir / "ev" / "evaluation.json");
  EXPECT_EQ(report["frame_offset"], 19);
  for (const json &s : report["per_source"])
    EXPECT_GE(s["correlation"].get<double>(), 0.9) << report.dump(2);
}

TEST(RunConfigTest, JsonRoundTripIsLossless) {
  RunConfig c;
  c.separation.embed_order = 7;
  c.separation.lag_window = 9;
  c.separation.rank_threshold = 0.123456789012345678;
  c.separation.tol = 3e-9;
  c.separation.mode = SeparationMode::kSymmetric;
  c.separation.nonlinearity = NonlinearityKind::kGauss;
  c.separation.seed = 18446744073709551615ULL;
  c.separation.stop_norm = StopNorm::kMaxAbs;
  c.simulation.mixing_taps = MimoFirFilter::Taps{{{0.1, 0.2}}, {{0.3, 1.0 / 3.0}}};
  c.simulation.sources = 1;
  c.simulation.distributions = {Distribution::kBernoulliSign};
  c.simulation.sample_rate = 16000.0;
  c.sources = 2;
  c.channels = {1, 0};
  c.observations = "a/b.wav";
  c.out_dir = "out dir";
  c.format = SignalFormat::kWav;
  c.wav_encoding = WavEncoding::kPcm24;
  c.max_lag = 5;
  c.underdetermined_guard = false;
  const json once = ToJson(c);
  const RunConfig back = RunConfigFromJson(once);
  EXPECT_EQ(ToJson(back), once);
  EXPECT_EQ(back.separation.rank_threshold, c.separation.rank_threshold);
  EXPECT_EQ(back.separation.seed, c.separation.seed);
  EXPECT_EQ(*back.simulation.mixing_taps, *c.simulation.mixing_taps);
  // And through the textual form.
  EXPECT_EQ(ToJson(RunConfigFromJson(json::parse(once.dump()))), once);
}

TEST(RunConfigTest, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(RunConfigFromJson({{"separaton", json::object()}}), InvalidArgumentError);
  EXPECT_THROW(RunConfigFromJson({{"separation", {{"alpha", 0.9}}}}), InvalidArgumentError);
  EXPECT_THROW(RunConfigFromJson({{"format", "mp3"}}), InvalidArgumentError);
  EXPECT_THROW(RunConfigFromJson({{"schema_version", 7}}), InvalidArgumentError);
  RunConfig c;
  c.simulation.coloring_length = 2;
  EXPECT_THROW(c.Validate(), InvalidArgumentError);
}

TEST(RunConfigTest, ConfigFileThenFlagsPrecedence) {
  TempDir dir("cli");
  ASSERT_EQ(Invoke(SmallSimulation(dir / "sim")).code, 0);
  json config = {{"separation", {{"embed_order", 4}, {"lag_window", 2}, {"seed", 5}, {"tol", 1e-6}}},
                 {"observations", Str(dir / "sim" / "observations.csv")}};
  std::ofstream(dir / "cfg.json") << config.dump();
  ASSERT_EQ(Invoke({"separate", "--config", Str(dir / "cfg.json"), "--tol", "1e-5", "--out",
                 Str(dir / "sep")})
                .code,
            0);
  const RunConfig used = LoadRunConfig(dir / "sep" / "run_config.json");
  EXPECT_EQ(used.separation.embed_order, 4);
  EXPECT_EQ(used.separation.seed, 5u);
  EXPECT_EQ(used.separation.tol, 1e-5);
  EXPECT_EQ(used.separation.rank_threshold, 0.99995);
}

TEST(CliUsageTest, BadArgumentsExitOne) {
  EXPECT_EQ(Invoke({}).code, 1);
  EXPECT_EQ(Invoke({"frobnicate"}).code, 1);
  EXPECT_EQ(Invoke({"separate", "x.csv", "--mode", "sideways"}).code, 1);
  EXPECT_EQ(Invoke({"separate", "x.csv", "--config", "/nonexistent/cfg.json"}).code, 1);
  const CliResult help = Invoke({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("simulate"), std::string::npos);
}

}  // namespace
}  // namespace convbss
