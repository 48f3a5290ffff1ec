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

#ifndef PEEPHOLE_LSTM_HPP_
#define PEEPHOLE_LSTM_HPP_

#include <array>
#include <span>
#include <vector>

#include "peephole/tensor.hpp"

namespace peephole::nn {

/// Gate order used by every per-gate array below.
enum Gate : std::size_t { kInputGate = 0, kOutputGate = 1, kForgetGate = 2, kCandidate = 3 };
inline constexpr std::size_t kNumGates = 4;

/// Weights of one LSTM cell. W[g] is [hidden x input], U[g] is
/// [hidden x hidden], b[g] is [hidden], indexed by Gate.
struct LstmParams {
  std::array<Tensor, kNumGates> W;
  std::array<Tensor, kNumGates> U;
  std::array<Tensor, kNumGates> b;

  static LstmParams zeros(std::size_t input, std::size_t hidden);

  std::size_t input_size() const { return W[0].cols(); }
  std::size_t hidden_size() const { return W[0].rows(); }

  /// Throws DimensionError unless all twelve tensors agree.
  void validate() const;
};

struct LstmStepOutput {
  std::vector<double> h;
  std::vector<double> c;
  std::vector<double> input_gate;
  std::vector<double> output_gate;
  std::vector<double> forget_gate;
  std::vector<double> candidate;
};

/// One step of the cell:
///   i = sig(Wi x + Ui h + bi), o = sig(Wo x + Uo h + bo),
///   f = sig(Wf x + Uf h + bf), u = tanh(Wu x + Uu h + bu),
///   c = i*u + f*c_prev,        h = o*tanh(c).
LstmStepOutput lstm_step(const LstmParams& p, std::span<const double> x, std::span<const double> h_prev,
                         std::span<const double> c_prev);

/// Activations recorded by lstm_forward for the backward pass.
struct LstmTape {
  struct Sequence {
    std::size_t length = 0;
    /// [length x 4*hidden]: activated i, o, f, u per step.
    Tensor gates;
    Tensor cell;    // [length x hidden]
    Tensor hidden;  // [length x hidden]
  };
  std::vector<Sequence> sequences;
  /// Last hidden state of every sequence, [batch x hidden].
  Tensor final_hidden;
};

/// Runs the cell over every sequence from zero state. inputs[b] is
/// [length_b x input] with length_b >= 1. Sequences are processed in lockstep
/// (right-aligned) so each weight row is read once per step for the whole
/// batch; each sequence's arithmetic is identical to running it alone.
LstmTape lstm_forward(const LstmParams& p, std::span<const Tensor> inputs);

/// Backpropagation through time. `d_final_hidden` is [batch x hidden].
/// Parameter gradients are accumulated into `grads`; when `d_inputs` is
/// non-null it receives one [length_b x input] gradient per sequence.
void lstm_backward(const LstmParams& p, const LstmTape& tape, std::span<const Tensor> inputs,
                   const Tensor& d_final_hidden, LstmParams& grads, std::vector<Tensor>* d_inputs);

}  // namespace peephole::nn

#endif  // PEEPHOLE_LSTM_HPP_
