// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "mcad/numkit/tensor.hpp"

namespace mcad::nk {

// y = x W + b, applied row-wise.
struct LinearSpec {
  Tensor2 w;  // in x out
  std::vector<double> b;

  static LinearSpec zeros(std::size_t in, std::size_t out);
};

struct LinearGrads {
  Tensor2 dx;
  Tensor2 dw;
  std::vector<double> db;
};

Tensor2 linear_forward(const Tensor2& x, const LinearSpec& spec);
LinearGrads linear_backward(const Tensor2& x, const LinearSpec& spec, const Tensor2& upstream);

}  // namespace mcad::nk
