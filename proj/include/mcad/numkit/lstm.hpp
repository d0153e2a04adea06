// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "mcad/numkit/tensor.hpp"

namespace mcad::nk {

// Standard LSTM cell. Gate blocks in w/u/b are stacked in the order
// input, forget, candidate, output, each hidden_dim rows tall.
struct LstmSpec {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  Tensor2 w;  // 4H x input_dim
  Tensor2 u;  // 4H x H
  std::vector<double> b;

  static LstmSpec zeros(std::size_t input_dim, std::size_t hidden_dim);
  void validate() const;
};

struct LstmState {
  std::vector<double> h;
  std::vector<double> c;
};

LstmState lstm_cell(std::span<const double> x, std::span<const double> h_prev,
                    std::span<const double> c_prev, const LstmSpec& spec);

// Everything the backward pass needs. Rows are indexed by input time step
// regardless of direction.
struct LstmTrace {
  bool reverse = false;
  Tensor2 x;
  Tensor2 gates;   // T x 4H, post-activation
  Tensor2 c;       // T x H
  Tensor2 c_prev;  // T x H
  Tensor2 tanh_c;  // T x H
  Tensor2 h;       // T x H
  Tensor2 h_prev;  // T x H
};

struct LstmGrads {
  Tensor2 dw;
  Tensor2 du;
  std::vector<double> db;

  static LstmGrads zeros_like(const LstmSpec& spec);
};

// Runs the cell over every row of x starting from zero state; with
// reverse=true the sequence is consumed from the last row to the first.
LstmTrace lstm_sequence_forward(const Tensor2& x, const LstmSpec& spec, bool reverse);
// Accumulates parameter gradients into `acc` and returns dL/dx.
Tensor2 lstm_sequence_backward(const LstmTrace& trace, const LstmSpec& spec,
                               const Tensor2& upstream_h, LstmGrads& acc);

struct BiLstmLayer {
  LstmSpec forward;
  LstmSpec backward;
};

struct BiLstmSpec {
  std::vector<BiLstmLayer> layers;
  std::size_t output_dim() const;
};

struct BiLstmTrace {
  std::vector<std::array<LstmTrace, 2>> layers;
  Tensor2 output;
};

struct BiLstmGrads {
  std::vector<std::array<LstmGrads, 2>> layers;
  static BiLstmGrads zeros_like(const BiLstmSpec& spec);
};

// Per step output is [forward h | backward h]; layer l+1 consumes the
// concatenated output of layer l.
Tensor2 bilstm_forward(const Tensor2& x, const BiLstmSpec& spec);
BiLstmTrace bilstm_forward_trace(const Tensor2& x, const BiLstmSpec& spec);
Tensor2 bilstm_backward(const BiLstmTrace& trace, const BiLstmSpec& spec,
                        const Tensor2& upstream, BiLstmGrads& acc);

}  // namespace mcad::nk
