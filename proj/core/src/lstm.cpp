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

#include "peephole/lstm.hpp"

#include <algorithm>
#include <cmath>

#include "kernels.hpp"
#include "peephole/errors.hpp"
#include "peephole/ops.hpp"

namespace peephole::nn {

namespace {

double activate(std::size_t gate, double z) { return gate == kCandidate ? fast_tanh(z) : sigmoid(z); }

// Pre-activation of row r of gate g.
double gate_input(const LstmParams& p, std::size_t g, std::size_t r, const double* x, const double* h) {
  const std::size_t in = p.input_size();
  const std::size_t hid = p.hidden_size();
  return p.b[g][r] + kernels::dot(p.W[g].row(r).data(), x, in) + kernels::dot(p.U[g].row(r).data(), h, hid);
}

// y += sum over members j (in order) of dz[member_j, col] * vec[j].
void accumulate_rows(const Tensor& d_gate, std::size_t col, const std::vector<std::size_t>& members,
                     const std::vector<const double*>& vec, double* y, std::size_t n) {
  std::size_t j = 0;
  for (; j + 4 <= members.size(); j += 4) {
    const double alpha[4] = {d_gate.at(members[j], col), d_gate.at(members[j + 1], col),
                             d_gate.at(members[j + 2], col), d_gate.at(members[j + 3], col)};
    kernels::axpy_x4(alpha, &vec[j], y, n);
  }
  for (; j < members.size(); ++j) kernels::axpy(d_gate.at(members[j], col), vec[j], y, n);
}

// y += sum over rows r (in order) of dz[r] * m.row(r).
void accumulate_cols(const Tensor& m, const double* dz, double* y) {
  const std::size_t rows = m.rows();
  const std::size_t n = m.cols();
  std::size_t r = 0;
  for (; r + 4 <= rows; r += 4) {
    const double* x[4] = {m.row(r).data(), m.row(r + 1).data(), m.row(r + 2).data(), m.row(r + 3).data()};
    kernels::axpy_x4(dz + r, x, y, n);
  }
  for (; r < rows; ++r) kernels::axpy(dz[r], m.row(r).data(), y, n);
}

}  // namespace

LstmParams LstmParams::zeros(std::size_t input, std::size_t hidden) {
  LstmParams p;
  for (std::size_t g = 0; g < kNumGates; ++g) {
    p.W[g] = Tensor({hidden, input});
    p.U[g] = Tensor({hidden, hidden});
    p.b[g] = Tensor({hidden});
  }
  return p;
}

void LstmParams::validate() const {
  const std::size_t in = input_size();
  const std::size_t hid = hidden_size();
  for (std::size_t g = 0; g < kNumGates; ++g) {
    require_shape(W[g], {hid, in}, "lstm W");
    require_shape(U[g], {hid, hid}, "lstm U");
    require_shape(b[g], {hid}, "lstm b");
  }
}

LstmStepOutput lstm_step(const LstmParams& p, std::span<const double> x, std::span<const double> h_prev,
                         std::span<const double> c_prev) {
  p.validate();
  const std::size_t hid = p.hidden_size();
  if (x.size() != p.input_size() || h_prev.size() != hid || c_prev.size() != hid) {
    throw DimensionError("lstm_step: input/state sizes do not match the cell");
  }
  LstmStepOutput out;
  std::array<std::vector<double>*, kNumGates> gates = {&out.input_gate, &out.output_gate, &out.forget_gate,
                                                       &out.candidate};
  for (std::size_t g = 0; g < kNumGates; ++g) {
    gates[g]->resize(hid);
    for (std::size_t r = 0; r < hid; ++r) {
      (*gates[g])[r] = activate(g, gate_input(p, g, r, x.data(), h_prev.data()));
    }
  }
  out.c.resize(hid);
  out.h.resize(hid);
  for (std::size_t r = 0; r < hid; ++r) {
    out.c[r] = out.input_gate[r] * out.candidate[r] + out.forget_gate[r] * c_prev[r];
    out.h[r] = out.output_gate[r] * fast_tanh(out.c[r]);
  }
  return out;
}

LstmTape lstm_forward(const LstmParams& p, std::span<const Tensor> inputs) {
  p.validate();
  const std::size_t in = p.input_size();
  const std::size_t hid = p.hidden_size();
  const std::size_t batch = inputs.size();

  LstmTape tape;
  tape.sequences.resize(batch);
  tape.final_hidden = Tensor({batch, hid});
  std::size_t steps = 0;
  for (std::size_t b = 0; b < batch; ++b) {
    if (inputs[b].rank() != 2 || inputs[b].cols() != in || inputs[b].rows() == 0) {
      throw DimensionError("lstm_forward: sequence " + std::to_string(b) + " has shape " +
                           shape_string(inputs[b].shape()));
    }
    auto& seq = tape.sequences[b];
    seq.length = inputs[b].rows();
    seq.gates = Tensor({seq.length, kNumGates * hid});
    seq.cell = Tensor({seq.length, hid});
    seq.hidden = Tensor({seq.length, hid});
    steps = std::max(steps, seq.length);
  }

  const std::vector<double> zeros(hid, 0.0);
  std::vector<std::size_t> active;
  std::vector<const double*> xs, hs;
  for (std::size_t s = 0; s < steps; ++s) {
    active.clear();
    for (std::size_t b = 0; b < batch; ++b) {
      if (s + tape.sequences[b].length >= steps) active.push_back(b);
    }
    auto local = [&](std::size_t b) { return s + tape.sequences[b].length - steps; };

    xs.clear();
    hs.clear();
    for (std::size_t b : active) {
      const std::size_t t = local(b);
      xs.push_back(inputs[b].row(t).data());
      hs.push_back(t == 0 ? zeros.data() : tape.sequences[b].hidden.row(t - 1).data());
    }
    const std::size_t n = active.size();
    for (std::size_t g = 0; g < kNumGates; ++g) {
      for (std::size_t r = 0; r < hid; ++r) {
        const double* w = p.W[g].row(r).data();
        const double* u = p.U[g].row(r).data();
        const double bias = p.b[g][r];
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4) {
          double wx[4], uh[4];
          kernels::dot_x4(w, &xs[j], in, wx);
          kernels::dot_x4(u, &hs[j], hid, uh);
          for (std::size_t k = 0; k < 4; ++k) {
            auto& seq = tape.sequences[active[j + k]];
            seq.gates.at(local(active[j + k]), g * hid + r) = activate(g, bias + wx[k] + uh[k]);
          }
        }
        for (; j < n; ++j) {
          auto& seq = tape.sequences[active[j]];
          const double z = bias + kernels::dot(w, xs[j], in) + kernels::dot(u, hs[j], hid);
          seq.gates.at(local(active[j]), g * hid + r) = activate(g, z);
        }
      }
    }
    for (std::size_t b : active) {
      auto& seq = tape.sequences[b];
      const std::size_t t = local(b);
      const double* gate = seq.gates.row(t).data();
      const double* c_prev = t == 0 ? zeros.data() : seq.cell.row(t - 1).data();
      double* c = seq.cell.row(t).data();
      double* h = seq.hidden.row(t).data();
      for (std::size_t r = 0; r < hid; ++r) {
        c[r] = gate[kInputGate * hid + r] * gate[kCandidate * hid + r] + gate[kForgetGate * hid + r] * c_prev[r];
        h[r] = gate[kOutputGate * hid + r] * fast_tanh(c[r]);
      }
    }
  }
  for (std::size_t b = 0; b < batch; ++b) {
    const auto& seq = tape.sequences[b];
    std::copy_n(seq.hidden.row(seq.length - 1).data(), hid, tape.final_hidden.row(b).data());
  }
  return tape;
}

void lstm_backward(const LstmParams& p, const LstmTape& tape, std::span<const Tensor> inputs,
                   const Tensor& d_final_hidden, LstmParams& grads, std::vector<Tensor>* d_inputs) {
  const std::size_t in = p.input_size();
  const std::size_t hid = p.hidden_size();
  const std::size_t batch = tape.sequences.size();
  if (inputs.size() != batch) throw DimensionError("lstm_backward: input count differs from tape");
  require_shape(d_final_hidden, {batch, hid}, "lstm_backward d_final_hidden");

  std::size_t steps = 0;
  for (const auto& seq : tape.sequences) steps = std::max(steps, seq.length);
  if (d_inputs) {
    d_inputs->clear();
    for (std::size_t b = 0; b < batch; ++b) d_inputs->emplace_back(Tensor({tape.sequences[b].length, in}));
  }

  Tensor d_hidden = d_final_hidden;
  Tensor d_cell({batch, hid});
  Tensor d_hidden_prev({batch, hid});
  Tensor d_gate({batch, kNumGates * hid});
  std::vector<std::size_t> active, recur;
  std::vector<const double*> xs, hs;

  for (std::size_t s = steps; s-- > 0;) {
    active.clear();
    for (std::size_t b = 0; b < batch; ++b) {
      if (s + tape.sequences[b].length >= steps) active.push_back(b);
    }
    auto local = [&](std::size_t b) { return s + tape.sequences[b].length - steps; };

    // Gate pre-activation gradients; d_cell becomes dc_{t-1}.
    for (std::size_t b : active) {
      const auto& seq = tape.sequences[b];
      const std::size_t t = local(b);
      const double* gate = seq.gates.row(t).data();
      const double* c = seq.cell.row(t).data();
      double* dz = d_gate.row(b).data();
      double* dc = d_cell.row(b).data();
      const double* dh = d_hidden.row(b).data();
      for (std::size_t r = 0; r < hid; ++r) {
        const double i = gate[kInputGate * hid + r];
        const double o = gate[kOutputGate * hid + r];
        const double f = gate[kForgetGate * hid + r];
        const double u = gate[kCandidate * hid + r];
        const double c_prev = t == 0 ? 0.0 : seq.cell.at(t - 1, r);
        const double tanh_c = fast_tanh(c[r]);
        const double d_c = dc[r] + dh[r] * o * (1.0 - tanh_c * tanh_c);
        dz[kInputGate * hid + r] = d_c * u * i * (1.0 - i);
        dz[kOutputGate * hid + r] = dh[r] * tanh_c * o * (1.0 - o);
        dz[kForgetGate * hid + r] = d_c * c_prev * f * (1.0 - f);
        dz[kCandidate * hid + r] = d_c * i * (1.0 - u * u);
        dc[r] = d_c * f;
      }
      std::fill_n(d_hidden_prev.row(b).data(), hid, 0.0);
    }

    // Sequences with a previous hidden state; only they feed U.
    xs.clear();
    recur.clear();
    hs.clear();
    for (std::size_t b : active) {
      const std::size_t t = local(b);
      xs.push_back(inputs[b].row(t).data());
      if (t > 0) {
        recur.push_back(b);
        hs.push_back(tape.sequences[b].hidden.row(t - 1).data());
      }
    }

    for (std::size_t g = 0; g < kNumGates; ++g) {
      for (std::size_t r = 0; r < hid; ++r) {
        const std::size_t col = g * hid + r;
        double* dw = grads.W[g].row(r).data();
        double* du = grads.U[g].row(r).data();
        for (std::size_t b : active) grads.b[g][r] += d_gate.at(b, col);
        accumulate_rows(d_gate, col, active, xs, dw, in);
        accumulate_rows(d_gate, col, recur, hs, du, hid);
      }
      // Gradients flowing back into x_t and h_{t-1}, rows in ascending order.
      for (std::size_t b : active) {
        const std::size_t t = local(b);
        const double* dz = d_gate.row(b).data() + g * hid;
        if (d_inputs) accumulate_cols(p.W[g], dz, (*d_inputs)[b].row(t).data());
        if (t > 0) accumulate_cols(p.U[g], dz, d_hidden_prev.row(b).data());
      }
    }
    for (std::size_t b : active) {
      std::copy_n(d_hidden_prev.row(b).data(), hid, d_hidden.row(b).data());
    }
  }
}

}  // namespace peephole::nn
