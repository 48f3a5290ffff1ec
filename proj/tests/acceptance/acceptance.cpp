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

// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails. Artifacts land in --work-dir.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "peephole/arch_io.hpp"
#include "peephole/checkpoint.hpp"
#include "peephole/dataset.hpp"
#include "peephole/errors.hpp"
#include "peephole/generator.hpp"
#include "peephole/metrics.hpp"
#include "peephole/model_check.hpp"
#include "peephole/oracle.hpp"
#include "peephole/rng.hpp"
#include "peephole/trainer.hpp"
#include "support/reference.hpp"
#include "support/temp_dir.hpp"

namespace peephole {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using nlohmann::json;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

void write_json(const fs::path& path, const json& j) { testing::write_file(path, j.dump(2) + "\n"); }

// ---------------------------------------------------------------- AC1
struct PipelineRun {
  Metrics metrics;
  double seconds = 0.0;
  double first_loss = 0.0;
  double best_loss = 0.0;
  int best_epoch = 0;
  PeepholeParams params;
};

PipelineRun run_pipeline(const fs::path& dir) {
  fs::create_directories(dir);
  const auto start = Clock::now();
  const SkeletonConfig skeleton;  // seed 42
  const auto archs = generate_archs(1000, skeleton, 4);
  write_archs_jsonl(dir / "archs.jsonl", archs);
  const auto data = label_dataset(archs, 60, oracle_accuracy, 4);
  write_dataset(dir / "data.jsonl", data);

  const TrainConfig config;
  std::cerr << "  training " << config.epochs << " epochs on " << data.size() << " samples\n";
  const TrainResult result = train(config, data, [](const EpochRecord& e) {
    if (e.epoch % 10 == 0) {
      std::cerr << "    epoch " << e.epoch << " loss " << e.train_loss << " val_mse " << e.val_mse << " tau "
                << e.val_tau.value_or(NAN) << "\n";
    }
  });
  save_checkpoint(result.params, dir / "model.ckpt");
  testing::write_file(dir / "history.json", history_to_json(result.history) + "\n");

  std::vector<Sample> val;
  for (auto i : result.split.val) val.push_back(data[i]);
  PipelineRun run;
  run.metrics = evaluate(result.params, val);
  testing::write_file(dir / "metrics.json", metrics_to_json(run.metrics) + "\n");
  run.seconds = seconds_since(start);
  run.first_loss = result.history.front().train_loss;
  run.best_loss = result.history[static_cast<std::size_t>(result.best_epoch - 1)].train_loss;
  run.best_epoch = result.best_epoch;
  run.params = result.params;
  return run;
}

Outcome ac1(const PipelineRun& r) {
  const Metrics& m = r.metrics;
  Outcome o;
  o.pass = m.n == 200 && m.tau >= 0.80 && m.r2 >= 0.70 && m.mse <= 0.002 && r.seconds < 900.0;
  o.detail = "n=" + std::to_string(m.n) + " tau=" + fmt("%.4f", m.tau) + " (>=0.80) r2=" + fmt("%.4f", m.r2) +
             " (>=0.70) mse=" + fmt("%.5f", m.mse) + " (<=0.002) time=" + fmt("%.0f", r.seconds) +
             "s (<900) best_epoch=" + std::to_string(r.best_epoch) + " loss epoch1=" + fmt("%.3g", r.first_loss) +
             " best=" + fmt("%.3g", r.best_loss);
  return o;
}

// ---------------------------------------------------------------- AC2
Outcome ac2(const fs::path& dir) {
  const auto start = Clock::now();
  const ModelGradCheckConfig config;
  const auto cases = model_grad_check(config);
  const double secs = seconds_since(start);
  double worst = 0.0;
  double weakest_control = INFINITY;
  json report = json::array();
  for (const auto& c : cases) {
    worst = std::max(worst, c.exact.max_rel_error);
    weakest_control = std::min(weakest_control, c.corrupted.max_rel_error);
    report.push_back({{"length", c.length},
                      {"seed", c.seed},
                      {"checked", c.exact.checked},
                      {"max_rel_error", c.exact.max_rel_error},
                      {"worst", c.exact.worst_name + "[" + std::to_string(c.exact.worst_index) + "]"},
                      {"corrupted_max_rel_error", c.corrupted.max_rel_error}});
    std::cerr << "  " << to_string(c) << "\n";
  }
  write_json(dir / "gradcheck.json", report);
  Outcome o;
  o.pass = cases.size() == 9 && worst < 1e-4 && weakest_control > 1e-3 && secs < 120.0;
  o.detail = std::to_string(cases.size()) + " cases, max_rel=" + fmt("%.2e", worst) +
             " (<1e-4) weakest corrupted=" + fmt("%.2e", weakest_control) + " (>1e-3) time=" + fmt("%.0f", secs) +
             "s (<120)";
  return o;
}

// ---------------------------------------------------------------- AC3
Outcome ac3(const fs::path& dir) {
  constexpr int kTransitions = 100000;
  constexpr int kBlocks = 10000;
  const TransitionMatrix table = TransitionMatrix::standard();
  double worst_gap = 0.0;
  int impossible = 0;
  json rows = json::object();
  for (LayerKind from : kChainKinds) {
    Rng rng(child_seed(42, chain_index(from)));
    std::array<int, kChainKinds.size()> counts{};
    for (int k = 0; k < kTransitions; ++k) ++counts[chain_index(next_layer_type(rng, from))];
    std::vector<double> freqs;
    for (std::size_t j = 0; j < counts.size(); ++j) {
      const double f = static_cast<double>(counts[j]) / kTransitions;
      const double expected = table.row(from)[j];
      worst_gap = std::max(worst_gap, std::abs(f - expected));
      if (expected == 0.0 && counts[j] > 0) ++impossible;
      freqs.push_back(f);
    }
    rows[std::string(kind_name(from))] = freqs;
  }

  Rng rng(child_seed(42, 100));
  int violations = 0, convs = 0, bn_after_conv = 0;
  for (int b = 0; b < kBlocks; ++b) {
    const Block block = sample_block(rng);
    int block_convs = 0;
    bool bad = block.layers.size() > 10 || !block_violations(block).empty();
    for (std::size_t i = 0; i < block.layers.size(); ++i) {
      const LayerKind kind = block.layers[i].kind;
      if (kind == LayerKind::kConv) {
        ++block_convs;
        if (i + 1 < block.layers.size() && block.layers[i + 1].kind == LayerKind::kBatchNorm) ++bn_after_conv;
      }
      if (kind == LayerKind::kBatchNorm && (i == 0 || block.layers[i - 1].kind != LayerKind::kConv)) bad = true;
    }
    convs += block_convs;
    if (block_convs > 3) bad = true;
    if (bad) ++violations;
  }
  const double bn_rate = static_cast<double>(bn_after_conv) / convs;
  write_json(dir / "generator_stats.json", {{"transition_frequencies", rows},
                                            {"worst_gap", worst_gap},
                                            {"violations", violations},
                                            {"bn_after_conv_rate", bn_rate}});
  Outcome o;
  o.pass = worst_gap <= 0.01 && impossible == 0 && violations == 0 && std::abs(bn_rate - 0.60) <= 0.02;
  o.detail = "worst transition gap=" + fmt("%.4f", worst_gap) + " (<=0.01) over 6x" + std::to_string(kTransitions) +
             " draws, violations=" + std::to_string(violations) + "/" + std::to_string(kBlocks) +
             " bn_after_conv=" + fmt("%.4f", bn_rate) + " (0.60+-0.02)";
  return o;
}

// ---------------------------------------------------------------- AC4
Outcome ac4() {
  int valid = 0, invalid = 0, mismatches = 0;
  for (int ty = 1; ty <= kNumLayerKinds; ++ty) {
    for (int kw = 1; kw <= kMaxKernel; ++kw) {
      for (int kh = 1; kh <= kMaxKernel; ++kh) {
        for (int ch = 1; ch <= kNumChannelBins; ++ch) {
          const LayerCode code{ty, kw, kh, ch};
          LayerSpec spec;
          try {
            spec = decode_layer(code);
          } catch (const DataError&) {
            ++invalid;
            continue;
          }
          ++valid;
          if (!(encode_layer(spec) == code) || !(decode_layer(encode_layer(spec)) == spec)) ++mismatches;
        }
      }
    }
  }
  int idempotence = 0;
  for (int bin = 1; bin <= kNumChannelBins; ++bin) {
    if (quantize_ratio(dequantize_bin(bin)) != bin) ++idempotence;
  }
  Rng rng(4);
  for (int k = 0; k < 100000; ++k) {
    const double r = std::exp(rng.uniform(std::log(0.05), std::log(8.0)));
    const int q = quantize_ratio(r);
    if (quantize_ratio(dequantize_bin(q)) != q) ++idempotence;
  }
  Outcome o;
  o.pass = valid + invalid == 1400 && valid == 236 && mismatches == 0 && idempotence == 0;
  o.detail = "1400 codes: " + std::to_string(valid) + " valid, " + std::to_string(invalid) +
             " rejected, round-trip mismatches=" + std::to_string(mismatches) +
             ", quantizer idempotence failures=" + std::to_string(idempotence);
  return o;
}

// ---------------------------------------------------------------- AC5
Outcome ac5() {
  Rng rng(5);
  int mismatches = 0, tied_lists = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = rng.uniform_int(2, 8);
    const int levels = rng.uniform_int(2, 4);
    std::vector<double> a(static_cast<std::size_t>(n)), b(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = rng.uniform_int(1, levels);
      b[i] = rng.uniform_int(1, 4);
    }
    const double expected = testing::brute_tau_b(a, b);
    if (std::isnan(expected)) {
      ++tied_lists;
      try {
        kendall_tau(a, b);
        ++mismatches;
      } catch (const MetricError&) {
      }
      continue;
    }
    if (kendall_tau(a, b) != expected) ++mismatches;
  }
  Outcome o;
  o.pass = mismatches == 0;
  o.detail = "1000 lists (" + std::to_string(tied_lists) + " fully tied), mismatches=" + std::to_string(mismatches);
  return o;
}

// ---------------------------------------------------------------- AC6
Outcome ac6(const PipelineRun& run, const fs::path& dir) {
  SkeletonConfig probe_cfg;
  probe_cfg.rng_seed = 6;
  const auto probe = generate_archs(50, probe_cfg);
  std::vector<Example> examples;
  std::vector<std::vector<LayerCode>> codes;
  for (const auto& a : probe) codes.push_back(encode_network(a));
  for (const auto& c : codes) examples.push_back({c, 60, 0.0});
  const auto before = predict_batch(run.params, examples);
  save_checkpoint(run.params, dir / "probe.ckpt");
  const PeepholeParams loaded = load_checkpoint(dir / "probe.ckpt");
  const auto after = predict_batch(loaded, examples);
  int differing = 0;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    const double single = predict(loaded, codes[i], 60);
    if (std::memcmp(&before[i], &after[i], sizeof(double)) != 0 ||
        std::memcmp(&before[i], &single, sizeof(double)) != 0) {
      ++differing;
    }
  }
  json preds = before;
  write_json(dir / "probe_predictions.json", preds);
  Outcome o;
  o.pass = differing == 0 && before.size() == 50;
  o.detail = std::to_string(before.size()) + " probe architectures, bitwise differences=" + std::to_string(differing);
  return o;
}

// ---------------------------------------------------------------- AC7
const std::vector<std::string> kArtifacts = {"archs.jsonl",   "data.jsonl",          "model.ckpt",
                                             "history.json",  "metrics.json",        "gradcheck.json",
                                             "generator_stats.json", "probe_predictions.json"};

Outcome ac7(const fs::path& first, const fs::path& second) {
  std::vector<std::string> differing;
  for (const auto& name : kArtifacts) {
    if (testing::read_file(first / name) != testing::read_file(second / name)) differing.push_back(name);
  }
  Outcome o;
  o.pass = differing.empty();
  o.detail = std::to_string(kArtifacts.size()) + " artifacts compared";
  for (const auto& d : differing) o.detail += ", differs: " + d;
  return o;
}

struct Suite {
  PipelineRun pipeline;
  std::array<Outcome, 6> outcomes;
};

Suite run_suite(const fs::path& dir) {
  Suite s;
  std::cerr << "AC1: end-to-end pipeline in " << dir << "\n";
  s.pipeline = run_pipeline(dir);
  s.outcomes[0] = ac1(s.pipeline);
  std::cerr << "AC2: full-model gradient check\n";
  s.outcomes[1] = ac2(dir);
  s.outcomes[2] = ac3(dir);
  s.outcomes[3] = ac4();
  s.outcomes[4] = ac5();
  s.outcomes[5] = ac6(s.pipeline, dir);
  return s;
}

int run(const fs::path& work) {
  fs::remove_all(work);
  const Suite first = run_suite(work / "run1");
  std::cerr << "AC7: repeating criteria 1-6\n";
  const Suite second = run_suite(work / "run2");

  std::vector<Outcome> all(first.outcomes.begin(), first.outcomes.end());
  Outcome determinism = ac7(work / "run1", work / "run2");
  for (std::size_t k = 0; k < first.outcomes.size(); ++k) {
    if (first.outcomes[k].pass != second.outcomes[k].pass) {
      determinism.pass = false;
      determinism.detail += ", verdict of AC" + std::to_string(k + 1) + " changed";
    }
  }
  all.push_back(determinism);

  bool ok = true;
  for (std::size_t k = 0; k < all.size(); ++k) {
    std::cout << (all[k].pass ? "PASS" : "FAIL") << " AC" << k + 1 << ": " << all[k].detail << std::endl;
    ok = ok && all[k].pass;
  }
  return ok ? 0 : 1;
}

}  // namespace
}  // namespace peephole

int main(int argc, char** argv) {
  CLI::App app{"Peephole acceptance suite"};
  std::string work = "acceptance_work";
  app.add_option("--work-dir", work, "Directory for generated artifacts (wiped first)")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  try {
    return peephole::run(work);
  } catch (const std::exception& e) {
    std::cout << "FAIL acceptance aborted: " << e.what() << std::endl;
    return 2;
  }
}
