// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "mcad/numkit/tensor.hpp"

namespace mcad::nk {

// 1D convolution over time with same (zero) padding. Weights are laid out
// out_channels x in_channels x kernel_size.
struct ConvSpec {
  std::size_t kernel_size = 3;
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::vector<double> weights;
  std::vector<double> bias;

  static ConvSpec zeros(std::size_t kernel_size, std::size_t in_channels,
                        std::size_t out_channels);

  double& weight(std::size_t o, std::size_t c, std::size_t j) {
    return weights[(o * in_channels + c) * kernel_size + j];
  }
  double weight(std::size_t o, std::size_t c, std::size_t j) const {
    return weights[(o * in_channels + c) * kernel_size + j];
  }
  void validate() const;
};

struct ConvGrads {
  Tensor2 dx;
  std::vector<double> dw;
  std::vector<double> db;
};

// out[t, o] = b[o] + sum_{c, j} W[o, c, j] * x_pad[t + j, c]
Tensor2 conv1d_forward(const Tensor2& x, const ConvSpec& spec);
ConvGrads conv1d_backward(const Tensor2& x, const ConvSpec& spec, const Tensor2& upstream);

}  // namespace mcad::nk
