// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include "mcad/numkit/tensor.hpp"

namespace mcad::nk {

// Single-head scaled dot-product self-attention:
//   out = softmax(Z Wq (Z Wk)^T / sqrt(d_k)) Z Wv
struct AttnSpec {
  Tensor2 wq;  // dim x d_k
  Tensor2 wk;  // dim x d_k
  Tensor2 wv;  // dim x d_v

  static AttnSpec zeros(std::size_t dim, std::size_t dk, std::size_t dv);
  std::size_t input_dim() const { return wq.rows(); }
  std::size_t dk() const { return wq.cols(); }
  std::size_t dv() const { return wv.cols(); }
  void validate() const;
};

struct AttnTrace {
  Tensor2 z;
  Tensor2 q;
  Tensor2 k;
  Tensor2 v;
  Tensor2 weights;  // n x n, row-stochastic
  Tensor2 output;
};

struct AttnGrads {
  Tensor2 dz;
  Tensor2 dwq;
  Tensor2 dwk;
  Tensor2 dwv;
};

Tensor2 attention_forward(const Tensor2& z, const AttnSpec& spec);
AttnTrace attention_forward_trace(const Tensor2& z, const AttnSpec& spec);
AttnGrads attention_backward(const AttnTrace& trace, const AttnSpec& spec, const Tensor2& upstream);
AttnGrads attention_backward(const Tensor2& z, const AttnSpec& spec, const Tensor2& upstream);

}  // namespace mcad::nk
