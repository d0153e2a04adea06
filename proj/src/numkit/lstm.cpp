// SPDX-License-Identifier: Apache-2.0

#include "mcad/numkit/lstm.hpp"

#include <cmath>

#include "mcad/error.hpp"
#include "mcad/numkit/activations.hpp"
#include "mcad/simd/kernels.hpp"

namespace mcad::nk {

LstmSpec LstmSpec::zeros(std::size_t input_dim, std::size_t hidden_dim) {
  LstmSpec s;
  s.input_dim = input_dim;
  s.hidden_dim = hidden_dim;
  s.w = Tensor2(4 * hidden_dim, input_dim);
  s.u = Tensor2(4 * hidden_dim, hidden_dim);
  s.b.assign(4 * hidden_dim, 0.0);
  return s;
}

void LstmSpec::validate() const {
  const std::size_t g = 4 * hidden_dim;
  require_shape(w.rows() == g && w.cols() == input_dim, "lstm W shape");
  require_shape(u.rows() == g && u.cols() == hidden_dim, "lstm U shape");
  require_shape(b.size() == g, "lstm bias length");
}

LstmGrads LstmGrads::zeros_like(const LstmSpec& spec) {
  return {Tensor2(spec.w.rows(), spec.w.cols()), Tensor2(spec.u.rows(), spec.u.cols()),
          std::vector<double>(spec.b.size(), 0.0)};
}

namespace {

// pre[0..4H) -> activated gates in place; writes c and h.
void activate(std::span<double> gates, std::span<const double> c_prev, std::span<double> c,
              std::span<double> tanh_c, std::span<double> h, std::size_t hidden) {
  for (std::size_t k = 0; k < hidden; ++k) {
    const double i = sigmoid(gates[k]);
    const double f = sigmoid(gates[hidden + k]);
    const double g = std::tanh(gates[2 * hidden + k]);
    const double o = sigmoid(gates[3 * hidden + k]);
    gates[k] = i;
    gates[hidden + k] = f;
    gates[2 * hidden + k] = g;
    gates[3 * hidden + k] = o;
    c[k] = f * c_prev[k] + i * g;
    tanh_c[k] = std::tanh(c[k]);
    h[k] = o * tanh_c[k];
  }
}

}  // namespace

LstmState lstm_cell(std::span<const double> x, std::span<const double> h_prev,
                    std::span<const double> c_prev, const LstmSpec& spec) {
  spec.validate();
  const std::size_t hidden = spec.hidden_dim;
  require_shape(x.size() == spec.input_dim, "lstm_cell input size");
  require_shape(h_prev.size() == hidden && c_prev.size() == hidden, "lstm_cell state size");
  const auto& kern = simd::active();
  std::vector<double> gates(4 * hidden);
  for (std::size_t r = 0; r < 4 * hidden; ++r) {
    gates[r] = spec.b[r] + kern.dot(spec.w.row(r).data(), x.data(), x.size()) +
               kern.dot(spec.u.row(r).data(), h_prev.data(), hidden);
  }
  LstmState out{std::vector<double>(hidden), std::vector<double>(hidden)};
  std::vector<double> tanh_c(hidden);
  activate(gates, c_prev, out.c, tanh_c, out.h, hidden);
  return out;
}

LstmTrace lstm_sequence_forward(const Tensor2& x, const LstmSpec& spec, bool reverse) {
  spec.validate();
  require_shape(x.cols() == spec.input_dim, "lstm input dim");
  const std::size_t steps = x.rows();
  const std::size_t hidden = spec.hidden_dim;
  const auto& kern = simd::active();

  LstmTrace tr;
  tr.reverse = reverse;
  tr.x = x;
  tr.gates = matmul_bt(x, spec.w);
  tr.c = Tensor2(steps, hidden);
  tr.c_prev = Tensor2(steps, hidden);
  tr.tanh_c = Tensor2(steps, hidden);
  tr.h = Tensor2(steps, hidden);
  tr.h_prev = Tensor2(steps, hidden);

  std::vector<double> zero(hidden, 0.0);
  std::span<const double> h_prev = zero;
  std::span<const double> c_prev = zero;
  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t t = reverse ? steps - 1 - s : s;
    auto gates = tr.gates.row(t);
    for (std::size_t r = 0; r < 4 * hidden; ++r) {
      gates[r] += spec.b[r] + kern.dot(spec.u.row(r).data(), h_prev.data(), hidden);
    }
    std::copy(h_prev.begin(), h_prev.end(), tr.h_prev.row(t).begin());
    std::copy(c_prev.begin(), c_prev.end(), tr.c_prev.row(t).begin());
    activate(gates, c_prev, tr.c.row(t), tr.tanh_c.row(t), tr.h.row(t), hidden);
    h_prev = tr.h.row(t);
    c_prev = tr.c.row(t);
  }
  return tr;
}

Tensor2 lstm_sequence_backward(const LstmTrace& tr, const LstmSpec& spec,
                               const Tensor2& upstream_h, LstmGrads& acc) {
  const std::size_t steps = tr.x.rows();
  const std::size_t hidden = spec.hidden_dim;
  require_shape(upstream_h.rows() == steps && upstream_h.cols() == hidden, "lstm upstream shape");
  require_shape(acc.dw.rows() == spec.w.rows() && acc.du.rows() == spec.u.rows() &&
                    acc.db.size() == spec.b.size(),
                "lstm grad accumulator shape");
  const auto& kern = simd::active();

  Tensor2 dpre(steps, 4 * hidden);
  std::vector<double> dh_next(hidden, 0.0);
  std::vector<double> dc_next(hidden, 0.0);
  for (std::size_t s = 0; s < steps; ++s) {
    // Walk the processing order backwards.
    const std::size_t t = tr.reverse ? s : steps - 1 - s;
    auto gates = tr.gates.row(t);
    auto da = dpre.row(t);
    for (std::size_t k = 0; k < hidden; ++k) {
      const double i = gates[k];
      const double f = gates[hidden + k];
      const double g = gates[2 * hidden + k];
      const double o = gates[3 * hidden + k];
      const double tc = tr.tanh_c(t, k);
      const double dh = upstream_h(t, k) + dh_next[k];
      const double dc = dh * o * (1.0 - tc * tc) + dc_next[k];
      da[k] = dc * g * i * (1.0 - i);
      da[hidden + k] = dc * tr.c_prev(t, k) * f * (1.0 - f);
      da[2 * hidden + k] = dc * i * (1.0 - g * g);
      da[3 * hidden + k] = dh * tc * o * (1.0 - o);
      dc_next[k] = dc * f;
    }
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    for (std::size_t r = 0; r < 4 * hidden; ++r) {
      if (da[r] != 0.0) kern.axpy(da[r], spec.u.row(r).data(), dh_next.data(), hidden);
    }
  }

  for (std::size_t t = 0; t < steps; ++t) {
    auto da = dpre.row(t);
    for (std::size_t r = 0; r < 4 * hidden; ++r) acc.db[r] += da[r];
  }
  matmul_at_acc(dpre, tr.x, acc.dw);
  matmul_at_acc(dpre, tr.h_prev, acc.du);
  return matmul(dpre, spec.w);
}

std::size_t BiLstmSpec::output_dim() const {
  if (layers.empty()) return 0;
  return layers.back().forward.hidden_dim + layers.back().backward.hidden_dim;
}

BiLstmGrads BiLstmGrads::zeros_like(const BiLstmSpec& spec) {
  BiLstmGrads g;
  for (const auto& layer : spec.layers) {
    g.layers.push_back({LstmGrads::zeros_like(layer.forward), LstmGrads::zeros_like(layer.backward)});
  }
  return g;
}

BiLstmTrace bilstm_forward_trace(const Tensor2& x, const BiLstmSpec& spec) {
  if (spec.layers.empty()) throw Error(ErrorCode::ShapeMismatch, "bilstm has no layers");
  BiLstmTrace tr;
  const Tensor2* input = &x;
  for (const auto& layer : spec.layers) {
    auto fwd = lstm_sequence_forward(*input, layer.forward, false);
    auto bwd = lstm_sequence_forward(*input, layer.backward, true);
    const Tensor2* parts[] = {&fwd.h, &bwd.h};
    tr.output = hconcat(parts);
    tr.layers.push_back({std::move(fwd), std::move(bwd)});
    input = &tr.output;
  }
  return tr;
}

Tensor2 bilstm_forward(const Tensor2& x, const BiLstmSpec& spec) {
  return bilstm_forward_trace(x, spec).output;
}

Tensor2 bilstm_backward(const BiLstmTrace& tr, const BiLstmSpec& spec, const Tensor2& upstream,
                        BiLstmGrads& acc) {
  require_shape(acc.layers.size() == spec.layers.size(), "bilstm grad layers");
  Tensor2 grad = upstream;
  for (std::size_t li = spec.layers.size(); li-- > 0;) {
    const auto& layer = spec.layers[li];
    const std::size_t hf = layer.forward.hidden_dim;
    const std::size_t hb = layer.backward.hidden_dim;
    require_shape(grad.cols() == hf + hb, "bilstm upstream width");
    Tensor2 dx = lstm_sequence_backward(tr.layers[li][0], layer.forward,
                                        column_slice(grad, 0, hf), acc.layers[li][0]);
    Tensor2 dx_b = lstm_sequence_backward(tr.layers[li][1], layer.backward,
                                          column_slice(grad, hf, hb), acc.layers[li][1]);
    simd::axpy(1.0, dx_b.flat(), dx.flat());
    grad = std::move(dx);
  }
  return grad;
}

}  // namespace mcad::nk
