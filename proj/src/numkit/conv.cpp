// SPDX-License-Identifier: Apache-2.0

#include "mcad/numkit/conv.hpp"

#include <algorithm>
#include <cmath>

#include "mcad/error.hpp"
#include "mcad/simd/kernels.hpp"

namespace mcad::nk {

ConvSpec ConvSpec::zeros(std::size_t kernel_size, std::size_t in_channels,
                         std::size_t out_channels) {
  ConvSpec s;
  s.kernel_size = kernel_size;
  s.in_channels = in_channels;
  s.out_channels = out_channels;
  s.weights.assign(out_channels * in_channels * kernel_size, 0.0);
  s.bias.assign(out_channels, 0.0);
  return s;
}

void ConvSpec::validate() const {
  if (kernel_size == 0 || kernel_size % 2 == 0)
    throw Error(ErrorCode::ShapeMismatch, "conv kernel size must be odd");
  require_shape(weights.size() == out_channels * in_channels * kernel_size, "conv weight count");
  require_shape(bias.size() == out_channels, "conv bias count");
}

namespace {

// cols[t, c * k + j] = x[t + j - pad, c], zero outside the sequence.
Tensor2 im2col(const Tensor2& x, std::size_t k) {
  const std::size_t steps = x.rows();
  const std::size_t in = x.cols();
  const auto pad = static_cast<std::ptrdiff_t>(k / 2);
  Tensor2 cols(steps, in * k);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t j = 0; j < k; ++j) {
      const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t + j) - pad;
      if (src < 0 || src >= static_cast<std::ptrdiff_t>(steps)) continue;
      for (std::size_t c = 0; c < in; ++c) {
        cols(t, c * k + j) = x(static_cast<std::size_t>(src), c);
      }
    }
  }
  return cols;
}

}  // namespace

Tensor2 conv1d_forward(const Tensor2& x, const ConvSpec& spec) {
  spec.validate();
  require_shape(x.cols() == spec.in_channels, "conv1d input channels");
  const Tensor2 cols = im2col(x, spec.kernel_size);
  const std::size_t width = spec.in_channels * spec.kernel_size;
  const auto& kern = simd::active();
  Tensor2 out(x.rows(), spec.out_channels);
  for (std::size_t t = 0; t < x.rows(); ++t) {
    for (std::size_t o = 0; o < spec.out_channels; ++o) {
      out(t, o) = spec.bias[o] + kern.dot(cols.row(t).data(), spec.weights.data() + o * width, width);
    }
  }
  return out;
}

ConvGrads conv1d_backward(const Tensor2& x, const ConvSpec& spec, const Tensor2& upstream) {
  spec.validate();
  require_shape(x.cols() == spec.in_channels, "conv1d input channels");
  require_shape(upstream.rows() == x.rows() && upstream.cols() == spec.out_channels,
                "conv1d upstream shape");
  const std::size_t k = spec.kernel_size;
  const std::size_t width = spec.in_channels * k;
  const Tensor2 cols = im2col(x, k);
  const auto& kern = simd::active();

  ConvGrads g;
  g.dw.assign(spec.weights.size(), 0.0);
  g.db.assign(spec.out_channels, 0.0);
  Tensor2 dcols(x.rows(), width);
  for (std::size_t t = 0; t < x.rows(); ++t) {
    for (std::size_t o = 0; o < spec.out_channels; ++o) {
      const double up = upstream(t, o);
      if (up == 0.0) continue;
      g.db[o] += up;
      kern.axpy(up, cols.row(t).data(), g.dw.data() + o * width, width);
      kern.axpy(up, spec.weights.data() + o * width, dcols.row(t).data(), width);
    }
  }

  // col2im: scatter column gradients back onto the unpadded input.
  g.dx = Tensor2(x.rows(), x.cols());
  const auto pad = static_cast<std::ptrdiff_t>(k / 2);
  for (std::size_t t = 0; t < x.rows(); ++t) {
    for (std::size_t j = 0; j < k; ++j) {
      const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t + j) - pad;
      if (src < 0 || src >= static_cast<std::ptrdiff_t>(x.rows())) continue;
      for (std::size_t c = 0; c < x.cols(); ++c) {
        g.dx(static_cast<std::size_t>(src), c) += dcols(t, c * k + j);
      }
    }
  }
  return g;
}

}  // namespace mcad::nk
