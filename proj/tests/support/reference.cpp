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

#include "support/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace peephole::testing {

namespace {

int sign(double v) { return (v > 0.0) - (v < 0.0); }

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

PairCounts brute_pair_counts(std::span<const double> pred, std::span<const double> actual) {
  PairCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t j = i + 1; j < pred.size(); ++j) {
      const int sp = sign(pred[i] - pred[j]);
      const int sa = sign(actual[i] - actual[j]);
      if (sp == 0 && sa == 0) {
        ++c.tied_both;
      } else if (sp == 0) {
        ++c.tied_pred;
      } else if (sa == 0) {
        ++c.tied_actual;
      } else if (sp == sa) {
        ++c.concordant;
      } else {
        ++c.discordant;
      }
    }
  }
  return c;
}

double brute_tau_b(std::span<const double> pred, std::span<const double> actual) {
  const PairCounts c = brute_pair_counts(pred, actual);
  const double pq = static_cast<double>(c.concordant + c.discordant);
  const double denom = std::sqrt((pq + c.tied_pred) * (pq + c.tied_actual));
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(c.concordant - c.discordant) / denom;
}

ScalarLstmState reference_lstm_step(const nn::LstmParams& p, const std::vector<double>& x,
                                    const std::vector<double>& h_prev, const std::vector<double>& c_prev) {
  const std::size_t hid = h_prev.size();
  auto pre = [&](std::size_t g, std::size_t r) {
    double z = p.b[g][r];
    for (std::size_t k = 0; k < x.size(); ++k) z += p.W[g].at(r, k) * x[k];
    for (std::size_t k = 0; k < hid; ++k) z += p.U[g].at(r, k) * h_prev[k];
    return z;
  };
  ScalarLstmState s{std::vector<double>(hid), std::vector<double>(hid)};
  for (std::size_t r = 0; r < hid; ++r) {
    const double i = logistic(pre(nn::kInputGate, r));
    const double o = logistic(pre(nn::kOutputGate, r));
    const double f = logistic(pre(nn::kForgetGate, r));
    const double u = std::tanh(pre(nn::kCandidate, r));
    s.c[r] = i * u + f * c_prev[r];
    s.h[r] = o * std::tanh(s.c[r]);
  }
  return s;
}

std::vector<double> reference_lstm_sequence(const nn::LstmParams& p,
                                            const std::vector<std::vector<double>>& inputs) {
  const std::size_t hid = p.W[0].rows();
  ScalarLstmState s{std::vector<double>(hid, 0.0), std::vector<double>(hid, 0.0)};
  for (const auto& x : inputs) s = reference_lstm_step(p, x, s.h, s.c);
  return s.h;
}

double reference_oracle_level(const NetworkArch& arch) {
  double n_conv = 0, n_bn = 0, n_act = 0, area = 0, expansion = 1.0;
  const double depth = static_cast<double>(arch.layers.size());
  for (const auto& l : arch.layers) {
    switch (l.kind) {
      case LayerKind::kConv:
        n_conv += 1;
        area += l.kernel_w * l.kernel_h;
        expansion *= dequantize_bin(quantize_ratio(l.channel_ratio));
        break;
      case LayerKind::kBatchNorm: n_bn += 1; break;
      case LayerKind::kReLU:
      case LayerKind::kSigmoid:
      case LayerKind::kTanh: n_act += 1; break;
      default: break;
    }
  }
  const double log_expansion = std::min(2.0, std::max(-2.0, std::log(expansion) / std::log(2.0)));
  const double z = 0.4 * std::min(n_bn / n_conv, 1.0) * n_conv / 10.0 + 0.25 * log_expansion / 2.0 -
                   0.3 * depth / 30.0 + 0.2 * (area / n_conv) / 25.0 + 0.15 * n_act / depth;
  return 0.5 + 0.35 * std::tanh(z);
}

std::vector<LayerCode> all_valid_codes() {
  std::vector<LayerCode> out;
  for (int ty = 1; ty <= 7; ++ty) {
    for (int kw = 1; kw <= 5; ++kw) {
      for (int kh = 1; kh <= 5; ++kh) {
        for (int ch = 1; ch <= 8; ++ch) {
          const bool conv = ty == 1;
          const bool pool = ty == 2 || ty == 3;
          const bool kernel_ok = conv || (pool ? kw >= 2 && kh >= 2 : kw == 1 && kh == 1);
          const bool ch_ok = conv || ch == 4;
          if (kernel_ok && ch_ok) out.push_back({ty, kw, kh, ch});
        }
      }
    }
  }
  return out;
}

}  // namespace peephole::testing
