// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "mcad/numkit/tensor.hpp"

namespace mcad::nk {

Tensor2 relu(const Tensor2& x);
// Passes upstream where x > 0; the subgradient at 0 is taken as 0.
Tensor2 relu_backward(const Tensor2& x, const Tensor2& upstream);

// Max-subtracted, so large inputs do not overflow.
std::vector<double> softmax(std::span<const double> v);
void softmax_rows_inplace(Tensor2& x);

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace mcad::nk
