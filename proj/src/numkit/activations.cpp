// SPDX-License-Identifier: Apache-2.0

#include "mcad/numkit/activations.hpp"

#include <algorithm>
#include <cmath>

#include "mcad/simd/kernels.hpp"

namespace mcad::nk {

Tensor2 relu(const Tensor2& x) {
  Tensor2 out(x.rows(), x.cols());
  simd::active().relu(x.flat().data(), out.flat().data(), x.size());
  return out;
}

Tensor2 relu_backward(const Tensor2& x, const Tensor2& upstream) {
  require_shape(x.rows() == upstream.rows() && x.cols() == upstream.cols(),
                "relu_backward shape");
  Tensor2 out(x.rows(), x.cols());
  simd::active().relu_mask(x.flat().data(), upstream.flat().data(), out.flat().data(), x.size());
  return out;
}

namespace {
void softmax_into(std::span<const double> v, std::span<double> out) {
  if (v.empty()) return;
  const double peak = *std::max_element(v.begin(), v.end());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - peak);
    total += out[i];
  }
  const double inv = 1.0 / total;
  for (double& e : out) e *= inv;
}
}  // namespace

std::vector<double> softmax(std::span<const double> v) {
  std::vector<double> out(v.size());
  softmax_into(v, out);
  return out;
}

void softmax_rows_inplace(Tensor2& x) {
  for (std::size_t r = 0; r < x.rows(); ++r) softmax_into(x.row(r), x.row(r));
}

}  // namespace mcad::nk
