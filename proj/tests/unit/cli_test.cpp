// Copyright 2026 The Peephole Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "peephole/arch_io.hpp"
#include "peephole/checkpoint.hpp"
#include "peephole/dataset.hpp"
#include "peephole/rng.hpp"
#include "peephole/trainer.hpp"
#include "support/temp_dir.hpp"

namespace peephole::cli {
namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

const std::vector<std::string> kSmallModel = {"--hidden", "10", "--epoch-dim", "6", "--mlp-hidden", "12",
                                              "--t-max", "60"};

// One small generate -> label -> train pipeline shared by the suite.
class CliPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = std::make_unique<testing::TempDir>();
    ASSERT_EQ(run({"generate", "--count", "48", "--stages", "1", "--out", path("archs.jsonl"), "--seed", "5"}).code,
              0);
    ASSERT_EQ(run({"label", "--archs", path("archs.jsonl"), "--out", path("data.jsonl")}).code, 0);
    std::vector<std::string> args = {"train",     "--data",    path("data.jsonl"), "--out",  path("model.ckpt"),
                                     "--epochs",  "3",         "--batch-size",     "8",      "--quiet",
                                     "--history", path("h.json"), "--metrics",     path("m.json")};
    args.insert(args.end(), kSmallModel.begin(), kSmallModel.end());
    train_ = run(args);
    ASSERT_EQ(train_.code, 0) << train_.err;
  }
  static void TearDownTestSuite() { dir_.reset(); }

  static std::string path(const std::string& name) { return (*dir_ / name).string(); }

  static std::unique_ptr<testing::TempDir> dir_;
  static CliRun train_;
};

std::unique_ptr<testing::TempDir> CliPipeline::dir_;
CliRun CliPipeline::train_;

TEST_F(CliPipeline, GenerateAndLabelWriteExpectedCounts) {
  EXPECT_EQ(read_archs_jsonl(path("archs.jsonl")).size(), 48u);
  const auto data = read_dataset(path("data.jsonl"));
  ASSERT_EQ(data.size(), 48u);
  EXPECT_EQ(data[0].T, 60);
  EXPECT_EQ(data[0].curve.size(), 60u);
}

TEST_F(CliPipeline, TrainReportsHeldOutMetrics) {
  const auto reported = nlohmann::json::parse(train_.out);
  EXPECT_EQ(reported, nlohmann::json::parse(testing::read_file(path("m.json"))));
  EXPECT_EQ(reported.at("n").get<int>(), 10);
  EXPECT_EQ(nlohmann::json::parse(testing::read_file(path("h.json"))).size(), 3u);
}

TEST_F(CliPipeline, PredictPrintsOnlyTheLibraryValue) {
  const auto archs = read_archs_jsonl(path("archs.jsonl"));
  write_arch_file(path("one.json"), archs[7]);
  const CliRun r = run({"predict", "--model", path("model.ckpt"), "--arch", path("one.json"), "--epoch", "60"});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(lines(r.out).size(), 1u);
  const double expected = predict(load_checkpoint(path("model.ckpt")), encode_network(archs[7]), 60);
  EXPECT_EQ(std::stod(r.out), expected);
}

TEST_F(CliPipeline, RankTopOneIsArgmax) {
  const auto params = load_checkpoint(path("model.ckpt"));
  const auto archs = read_archs_jsonl(path("archs.jsonl"));
  std::vector<double> scores;
  for (const auto& a : archs) scores.push_back(predict(params, encode_network(a), 60));
  const auto best = static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());

  const CliRun top = run({"rank", "--model", path("model.ckpt"), "--archs", path("data.jsonl"), "--top", "1"});
  ASSERT_EQ(top.code, 0) << top.err;
  ASSERT_EQ(lines(top.out).size(), 1u);
  const std::string row = lines(top.out)[0];
  EXPECT_EQ(row.substr(0, row.rfind('\t')), "1\t" + std::to_string(best));
  EXPECT_EQ(std::stod(row.substr(row.rfind('\t') + 1)), scores[best]);

  const CliRun all = run({"rank", "--model", path("model.ckpt"), "--archs", path("archs.jsonl")});
  const auto rows = lines(all.out);
  ASSERT_EQ(rows.size(), archs.size());
  double prev = 2.0;
  for (const auto& row : rows) {
    const double s = std::stod(row.substr(row.rfind('\t') + 1));
    EXPECT_LE(s, prev);
    prev = s;
  }
}

TEST_F(CliPipeline, RankBreaksTiesByInputOrder) {
  const auto archs = read_archs_jsonl(path("archs.jsonl"));
  write_archs_jsonl(path("dupes.jsonl"), {archs[3], archs[3], archs[3]});
  const CliRun r = run({"rank", "--model", path("model.ckpt"), "--archs", path("dupes.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(rows[k].substr(0, 4), std::to_string(k + 1) + "\t" + std::to_string(k) + "\t");
}

TEST_F(CliPipeline, EvalMatchesLibrary) {
  const auto params = load_checkpoint(path("model.ckpt"));
  const auto data = read_dataset(path("data.jsonl"));
  const CliRun all = run({"eval", "--model", path("model.ckpt"), "--data", path("data.jsonl")});
  ASSERT_EQ(all.code, 0) << all.err;
  EXPECT_EQ(all.out, metrics_to_json(evaluate(params, data)) + "\n");

  const DataSplit split = split_dataset(data.size(), 0.2, 42);
  std::vector<Sample> val;
  for (auto i : split.val) val.push_back(data[i]);
  const CliRun held = run({"eval", "--model", path("model.ckpt"), "--data", path("data.jsonl"), "--split", "val"});
  EXPECT_EQ(held.out, metrics_to_json(evaluate(params, val)) + "\n");
  EXPECT_EQ(held.out, train_.out);
}

TEST_F(CliPipeline, FeaturesCsv) {
  const CliRun r = run({"features", "--model", path("model.ckpt"), "--archs", path("archs.jsonl"), "--out",
                     path("f.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(testing::read_file(path("f.csv")));
  ASSERT_EQ(rows.size(), 49u);
  EXPECT_EQ(std::count(rows[0].begin(), rows[0].end(), ','), 10);
}

TEST_F(CliPipeline, RepeatedCommandsAreByteIdentical) {
  ASSERT_EQ(run({"generate", "--count", "48", "--stages", "1", "--out", path("again.jsonl"), "--seed", "5",
                 "--threads", "3"})
                .code,
            0);
  EXPECT_EQ(testing::read_file(path("again.jsonl")), testing::read_file(path("archs.jsonl")));
  ASSERT_EQ(run({"label", "--archs", path("again.jsonl"), "--out", path("data2.jsonl"), "--threads", "2"}).code, 0);
  EXPECT_EQ(testing::read_file(path("data2.jsonl")), testing::read_file(path("data.jsonl")));
  std::vector<std::string> args = {"train",    "--data", path("data2.jsonl"), "--out",  path("model2.ckpt"),
                                   "--epochs", "3",      "--batch-size",      "8",      "--quiet"};
  args.insert(args.end(), kSmallModel.begin(), kSmallModel.end());
  const CliRun again = run(args);
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(again.out, train_.out);
  EXPECT_EQ(testing::read_file(path("model2.ckpt")), testing::read_file(path("model.ckpt")));
}

TEST_F(CliPipeline, DataErrors) {
  const auto archs = read_archs_jsonl(path("archs.jsonl"));
  write_arch_file(path("one.json"), archs[0]);
  CliRun r = run({"predict", "--model", path("model.ckpt"), "--arch", path("one.json"), "--epoch", "61"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(lines(r.err).size(), 1u);
  r = run({"predict", "--model", path("missing.ckpt"), "--arch", path("one.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("missing.ckpt"), std::string::npos);
  testing::write_file(path("broken.ckpt"), testing::read_file(path("model.ckpt")).substr(0, 100));
  EXPECT_EQ(run({"predict", "--model", path("broken.ckpt"), "--arch", path("one.json")}).code, 2);
  EXPECT_EQ(run({"label", "--archs", path("data.jsonl"), "--out", path("nodir/x.jsonl")}).code, 2);
  EXPECT_EQ(run({"train", "--data", path("archs.jsonl"), "--out", path("x.ckpt")}).code, 2);
  // 38 training samples cannot fill a batch of 40.
  EXPECT_EQ(run({"train", "--data", path("data.jsonl"), "--out", path("x.ckpt"), "--batch-size", "40"}).code, 2);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"generate"}).code, 1);
  EXPECT_EQ(run({"generate", "--out", "x.jsonl", "--bogus", "1"}).code, 1);
  EXPECT_EQ(run({"eval", "--model", "m", "--data", "d", "--split", "test"}).code, 1);
  EXPECT_EQ(run({"generate", "--out", "x.jsonl", "--count", "many"}).code, 1);
  const CliRun help = run({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("gradcheck"), std::string::npos);
}

TEST(Cli, ConfigFileSitsBetweenDefaultsAndFlags) {
  const testing::TempDir dir;
  testing::write_file(dir / "run.toml", "seed = 9\n[generate]\ncount = 4\nstages = 1\n");
  const std::string cfg = (dir / "run.toml").string();
  ASSERT_EQ(run({"generate", "--config", cfg, "--out", (dir / "a.jsonl").string()}).code, 0);
  const auto from_file = read_archs_jsonl(dir / "a.jsonl");
  ASSERT_EQ(from_file.size(), 4u);
  EXPECT_EQ(from_file[0].meta.seed, child_seed(9, 0));
  ASSERT_EQ(run({"generate", "--config", cfg, "--count", "2", "--seed", "3", "--out", (dir / "b.jsonl").string()})
                .code,
            0);
  const auto overridden = read_archs_jsonl(dir / "b.jsonl");
  ASSERT_EQ(overridden.size(), 2u);
  EXPECT_EQ(overridden[0].meta.seed, child_seed(3, 0));

  testing::write_file(dir / "bad.toml", "[generate]\ncolour = 3\n");
  EXPECT_EQ(run({"generate", "--config", (dir / "bad.toml").string(), "--out", (dir / "c.jsonl").string()}).code, 1);
}

TEST(Cli, GradcheckPassesAndFlagsImpossibleTolerance) {
  std::vector<std::string> args = {"gradcheck", "--lengths", "1", "3", "--seed", "4"};
  args.insert(args.end(), kSmallModel.begin(), kSmallModel.end());
  const CliRun ok = run(args);
  ASSERT_EQ(ok.code, 0) << ok.out << ok.err;
  const auto rows = lines(ok.out);
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows.back(), "PASS");
  args.insert(args.end(), {"--tolerance", "0"});
  const CliRun strict = run(args);
  EXPECT_EQ(strict.code, 3);
  EXPECT_EQ(lines(strict.out).back(), "FAIL");
}

}  // namespace
}  // namespace peephole::cli
