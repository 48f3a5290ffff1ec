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

#include "peephole/predictor.hpp"

#include <algorithm>
#include <cmath>

#include "peephole/errors.hpp"
#include "peephole/rng.hpp"

namespace peephole {

using nn::Tensor;

namespace {

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

void check_code_indices(const LayerCode& c) {
  if (c.ty < 1 || c.ty > kNumLayerKinds || c.kw < 1 || c.kw > kMaxKernel || c.kh < 1 || c.kh > kMaxKernel ||
      c.ch < 1 || c.ch > kNumChannelBins) {
    throw DataError("embedding lookup out of range for code " + to_string(c));
  }
}

void check_sequence(const PeepholeHyper& hyper, std::span<const LayerCode> codes) {
  if (codes.empty()) throw DataError("empty layer sequence");
  if (codes.size() > sz(hyper.max_sequence)) {
    throw DataError("layer sequence of length " + std::to_string(codes.size()) + " exceeds the maximum " +
                    std::to_string(hyper.max_sequence));
  }
}

void check_epoch(const PeepholeHyper& hyper, int epoch) {
  if (epoch < 1 || epoch > hyper.T_max) {
    throw DataError("epoch " + std::to_string(epoch) + " outside [1, " + std::to_string(hyper.T_max) + "]");
  }
}

Tensor embed_sequence(const EmbeddingTables& tables, std::span<const LayerCode> codes) {
  const std::size_t width = tables.type.cols() + 2 * tables.kernel.cols() + tables.channel.cols();
  Tensor x({codes.size(), width});
  for (std::size_t t = 0; t < codes.size(); ++t) {
    const auto row = embed_layer(tables, codes[t]);
    std::copy(row.begin(), row.end(), x.row(t).begin());
  }
  return x;
}

// [feature | epoch embedding] per row.
Tensor head_input(const PeepholeParams& params, const Tensor& features, std::span<const int> epochs) {
  const std::size_t hidden = features.cols();
  const std::size_t edim = params.tables.epoch.cols();
  Tensor input({features.rows(), hidden + edim});
  for (std::size_t b = 0; b < features.rows(); ++b) {
    auto dst = input.row(b);
    std::copy_n(features.row(b).begin(), hidden, dst.begin());
    const auto epoch_row = params.tables.epoch.row(sz(epochs[b] - 1));
    std::copy(epoch_row.begin(), epoch_row.end(), dst.begin() + static_cast<std::ptrdiff_t>(hidden));
  }
  return input;
}

struct HeadTrace {
  Tensor input, a1, y1, r1, a2, y2, r2, a3;
  nn::BatchNormCache bn1, bn2;
};

HeadTrace head_forward(const MlpHead& mlp, Tensor input, nn::Mode mode) {
  HeadTrace tr;
  tr.input = std::move(input);
  tr.a1 = nn::affine_forward(tr.input, mlp.fc1_weight, mlp.fc1_bias);
  tr.y1 = mode == nn::Mode::kTrain ? nn::batchnorm_train(tr.a1, mlp.bn1.gamma, mlp.bn1.beta, tr.bn1)
                                   : nn::batchnorm_infer(tr.a1, mlp.bn1);
  tr.r1 = nn::relu(tr.y1);
  tr.a2 = nn::affine_forward(tr.r1, mlp.fc2_weight, mlp.fc2_bias);
  tr.y2 = mode == nn::Mode::kTrain ? nn::batchnorm_train(tr.a2, mlp.bn2.gamma, mlp.bn2.beta, tr.bn2)
                                   : nn::batchnorm_infer(tr.a2, mlp.bn2);
  tr.r2 = nn::relu(tr.y2);
  tr.a3 = nn::affine_forward(tr.r2, mlp.fc3_weight, mlp.fc3_bias);
  return tr;
}

void glorot(Rng& rng, Tensor& w) {
  const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (double& v : w.data()) v = rng.uniform(-limit, limit);
}

void gaussian(Rng& rng, Tensor& t, double stddev) {
  for (double& v : t.data()) v = rng.normal(0.0, stddev);
}

}  // namespace

void PeepholeHyper::validate() const {
  if (d_type < 1 || d_kernel < 1 || d_channel < 1) throw DataError("embedding widths must be positive");
  if (layer_dim() != kLayerEmbeddingWidth) {
    throw DataError("layer embedding width must be " + std::to_string(kLayerEmbeddingWidth) + ", got " +
                    std::to_string(layer_dim()));
  }
  if (hidden < 1 || epoch_dim < 1 || mlp_hidden < 1) throw DataError("hidden sizes must be positive");
  if (T_max < 1) throw DataError("T_max must be >= 1");
  if (max_sequence < 1) throw DataError("max_sequence must be >= 1");
}

PeepholeParams PeepholeParams::zeros(const PeepholeHyper& hyper) {
  hyper.validate();
  PeepholeParams p;
  p.hyper = hyper;
  p.tables.type = Tensor({sz(kNumLayerKinds), sz(hyper.d_type)});
  p.tables.kernel = Tensor({sz(kMaxKernel), sz(hyper.d_kernel)});
  p.tables.channel = Tensor({sz(kNumChannelBins), sz(hyper.d_channel)});
  p.tables.epoch = Tensor({sz(hyper.T_max), sz(hyper.epoch_dim)});
  p.lstm = nn::LstmParams::zeros(sz(hyper.layer_dim()), sz(hyper.hidden));
  const std::size_t in = sz(hyper.mlp_input());
  const std::size_t hid = sz(hyper.mlp_hidden);
  auto zero_bn = [&] { return nn::BatchNormParams{Tensor({hid}), Tensor({hid}), Tensor({hid}), Tensor({hid})}; };
  p.mlp.fc1_weight = Tensor({hid, in});
  p.mlp.fc1_bias = Tensor({hid});
  p.mlp.bn1 = zero_bn();
  p.mlp.fc2_weight = Tensor({hid, hid});
  p.mlp.fc2_bias = Tensor({hid});
  p.mlp.bn2 = zero_bn();
  p.mlp.fc3_weight = Tensor({1, hid});
  p.mlp.fc3_bias = Tensor({1});
  return p;
}

std::vector<NamedTensor> PeepholeParams::trainable() {
  static constexpr const char* kGateNames[] = {"i", "o", "f", "u"};
  std::vector<NamedTensor> out = {
      {"embed.type", &tables.type},
      {"embed.kernel", &tables.kernel},
      {"embed.channel", &tables.channel},
      {"embed.epoch", &tables.epoch},
  };
  for (std::size_t g = 0; g < nn::kNumGates; ++g) out.push_back({std::string("lstm.W_") + kGateNames[g], &lstm.W[g]});
  for (std::size_t g = 0; g < nn::kNumGates; ++g) out.push_back({std::string("lstm.U_") + kGateNames[g], &lstm.U[g]});
  for (std::size_t g = 0; g < nn::kNumGates; ++g) out.push_back({std::string("lstm.b_") + kGateNames[g], &lstm.b[g]});
  out.insert(out.end(), {
                            {"mlp.fc1.weight", &mlp.fc1_weight},
                            {"mlp.fc1.bias", &mlp.fc1_bias},
                            {"mlp.bn1.gamma", &mlp.bn1.gamma},
                            {"mlp.bn1.beta", &mlp.bn1.beta},
                            {"mlp.fc2.weight", &mlp.fc2_weight},
                            {"mlp.fc2.bias", &mlp.fc2_bias},
                            {"mlp.bn2.gamma", &mlp.bn2.gamma},
                            {"mlp.bn2.beta", &mlp.bn2.beta},
                            {"mlp.fc3.weight", &mlp.fc3_weight},
                            {"mlp.fc3.bias", &mlp.fc3_bias},
                        });
  return out;
}

std::vector<NamedTensor> PeepholeParams::all_tensors() {
  auto out = trainable();
  out.insert(out.end(), {
                            {"mlp.bn1.running_mean", &mlp.bn1.running_mean},
                            {"mlp.bn1.running_var", &mlp.bn1.running_var},
                            {"mlp.bn2.running_mean", &mlp.bn2.running_mean},
                            {"mlp.bn2.running_var", &mlp.bn2.running_var},
                        });
  return out;
}

void PeepholeParams::validate() const {
  auto reference = zeros(hyper);
  auto mine = const_cast<PeepholeParams*>(this)->all_tensors();
  auto expected = reference.all_tensors();
  for (std::size_t k = 0; k < mine.size(); ++k) {
    nn::require_shape(*mine[k].tensor, expected[k].tensor->shape(), mine[k].name);
  }
}

PeepholeParams init_params(std::uint64_t seed, const PeepholeHyper& hyper) {
  PeepholeParams p = PeepholeParams::zeros(hyper);
  Rng rng(seed);
  gaussian(rng, p.tables.type, 0.1);
  gaussian(rng, p.tables.kernel, 0.1);
  gaussian(rng, p.tables.channel, 0.1);
  gaussian(rng, p.tables.epoch, 0.1);
  for (auto& w : p.lstm.W) glorot(rng, w);
  for (auto& u : p.lstm.U) glorot(rng, u);
  p.lstm.b[nn::kForgetGate].fill(1.0);
  glorot(rng, p.mlp.fc1_weight);
  glorot(rng, p.mlp.fc2_weight);
  glorot(rng, p.mlp.fc3_weight);
  for (auto* bn : {&p.mlp.bn1, &p.mlp.bn2}) {
    bn->gamma.fill(1.0);
    bn->running_var.fill(1.0);
  }
  return p;
}

std::vector<double> embed_layer(const EmbeddingTables& tables, const LayerCode& code) {
  check_code_indices(code);
  std::vector<double> out;
  out.reserve(tables.type.cols() + 2 * tables.kernel.cols() + tables.channel.cols());
  auto append = [&](std::span<const double> row) { out.insert(out.end(), row.begin(), row.end()); };
  append(tables.type.row(sz(code.ty - 1)));
  append(tables.kernel.row(sz(code.kw - 1)));
  append(tables.kernel.row(sz(code.kh - 1)));
  append(tables.channel.row(sz(code.ch - 1)));
  return out;
}

std::vector<double> structural_feature(const PeepholeParams& params, std::span<const LayerCode> codes) {
  check_sequence(params.hyper, codes);
  const Tensor x = embed_sequence(params.tables, codes);
  const auto tape = nn::lstm_forward(params.lstm, std::span(&x, 1));
  const auto h = tape.final_hidden.row(0);
  return {h.begin(), h.end()};
}

Tensor structural_features(const PeepholeParams& params, std::span<const std::vector<LayerCode>> sequences) {
  std::vector<Tensor> inputs;
  inputs.reserve(sequences.size());
  for (const auto& codes : sequences) {
    check_sequence(params.hyper, codes);
    inputs.push_back(embed_sequence(params.tables, codes));
  }
  return nn::lstm_forward(params.lstm, inputs).final_hidden;
}

std::vector<double> predict_batch(const PeepholeParams& params, std::span<const Example> batch) {
  if (batch.empty()) return {};
  std::vector<Tensor> inputs;
  std::vector<int> epochs;
  inputs.reserve(batch.size());
  for (const auto& ex : batch) {
    check_sequence(params.hyper, ex.codes);
    check_epoch(params.hyper, ex.epoch);
    inputs.push_back(embed_sequence(params.tables, ex.codes));
    epochs.push_back(ex.epoch);
  }
  const auto tape = nn::lstm_forward(params.lstm, inputs);
  const auto trace = head_forward(params.mlp, head_input(params, tape.final_hidden, epochs), nn::Mode::kInfer);
  std::vector<double> out(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) out[b] = nn::sigmoid(trace.a3[b]);
  return out;
}

double predict(const PeepholeParams& params, std::span<const LayerCode> codes, int epoch) {
  const Example ex{codes, epoch, 0.0};
  return predict_batch(params, std::span(&ex, 1)).front();
}

BatchLoss loss_and_grad(const PeepholeParams& params, std::span<const Example> batch, PeepholeParams* grads) {
  const std::size_t n = batch.size();
  if (n < 2) throw DimensionError("training batch needs at least 2 examples");
  std::vector<Tensor> inputs;
  std::vector<int> epochs;
  inputs.reserve(n);
  for (const auto& ex : batch) {
    check_sequence(params.hyper, ex.codes);
    check_epoch(params.hyper, ex.epoch);
    inputs.push_back(embed_sequence(params.tables, ex.codes));
    epochs.push_back(ex.epoch);
  }
  const auto tape = nn::lstm_forward(params.lstm, inputs);
  auto trace = head_forward(params.mlp, head_input(params, tape.final_hidden, epochs), nn::Mode::kTrain);

  BatchLoss result;
  result.predictions.resize(n);
  double total = 0.0;
  for (std::size_t b = 0; b < n; ++b) {
    result.predictions[b] = nn::sigmoid(trace.a3[b]);
    total += nn::smooth_l1(result.predictions[b], batch[b].target);
  }
  result.loss = total / static_cast<double>(n);

  if (grads) {
    const auto& mlp = params.mlp;
    auto& g = *grads;
    Tensor d_a3({n, 1});
    for (std::size_t b = 0; b < n; ++b) {
      const double p = result.predictions[b];
      d_a3[b] = nn::smooth_l1_grad(p, batch[b].target) / static_cast<double>(n) * p * (1.0 - p);
    }
    Tensor d_r2, d_a2, d_r1, d_a1, d_input;
    nn::affine_backward(trace.r2, mlp.fc3_weight, d_a3, g.mlp.fc3_weight, g.mlp.fc3_bias, &d_r2);
    nn::batchnorm_backward(nn::relu_backward(trace.y2, d_r2), mlp.bn2.gamma, trace.bn2, g.mlp.bn2.gamma,
                           g.mlp.bn2.beta, d_a2);
    nn::affine_backward(trace.r1, mlp.fc2_weight, d_a2, g.mlp.fc2_weight, g.mlp.fc2_bias, &d_r1);
    nn::batchnorm_backward(nn::relu_backward(trace.y1, d_r1), mlp.bn1.gamma, trace.bn1, g.mlp.bn1.gamma,
                           g.mlp.bn1.beta, d_a1);
    nn::affine_backward(trace.input, mlp.fc1_weight, d_a1, g.mlp.fc1_weight, g.mlp.fc1_bias, &d_input);

    const std::size_t hidden = sz(params.hyper.hidden);
    Tensor d_feature({n, hidden});
    for (std::size_t b = 0; b < n; ++b) {
      const auto row = d_input.row(b);
      std::copy_n(row.begin(), hidden, d_feature.row(b).begin());
      auto epoch_grad = g.tables.epoch.row(sz(epochs[b] - 1));
      for (std::size_t k = 0; k < epoch_grad.size(); ++k) epoch_grad[k] += row[hidden + k];
    }

    std::vector<Tensor> d_x;
    nn::lstm_backward(params.lstm, tape, inputs, d_feature, g.lstm, &d_x);

    const std::size_t dt = g.tables.type.cols();
    const std::size_t dk = g.tables.kernel.cols();
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t t = 0; t < batch[b].codes.size(); ++t) {
        const auto& code = batch[b].codes[t];
        const double* row = d_x[b].row(t).data();
        auto add = [](std::span<double> dst, const double* src) {
          for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
        };
        add(g.tables.type.row(sz(code.ty - 1)), row);
        add(g.tables.kernel.row(sz(code.kw - 1)), row + dt);
        add(g.tables.kernel.row(sz(code.kh - 1)), row + dt + dk);
        add(g.tables.channel.row(sz(code.ch - 1)), row + dt + 2 * dk);
      }
    }
  }

  result.bn1 = std::move(trace.bn1);
  result.bn2 = std::move(trace.bn2);
  return result;
}

void apply_batch_statistics(PeepholeParams& params, const BatchLoss& result, std::size_t batch_size) {
  nn::update_running_stats(params.mlp.bn1, result.bn1, batch_size);
  nn::update_running_stats(params.mlp.bn2, result.bn2, batch_size);
}

}  // namespace peephole
