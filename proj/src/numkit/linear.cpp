// SPDX-License-Identifier: Apache-2.0

#include "mcad/numkit/linear.hpp"

#include "mcad/simd/kernels.hpp"

namespace mcad::nk {

LinearSpec LinearSpec::zeros(std::size_t in, std::size_t out) {
  return {Tensor2(in, out), std::vector<double>(out, 0.0)};
}

Tensor2 linear_forward(const Tensor2& x, const LinearSpec& spec) {
  require_shape(spec.b.size() == spec.w.cols(), "linear bias length");
  Tensor2 y = matmul(x, spec.w);
  for (std::size_t r = 0; r < y.rows(); ++r) simd::axpy(1.0, spec.b, y.row(r));
  return y;
}

LinearGrads linear_backward(const Tensor2& x, const LinearSpec& spec, const Tensor2& upstream) {
  require_shape(upstream.rows() == x.rows() && upstream.cols() == spec.w.cols(),
                "linear upstream shape");
  LinearGrads g;
  g.dw = Tensor2(spec.w.rows(), spec.w.cols());
  matmul_at_acc(x, upstream, g.dw);
  g.db.assign(spec.w.cols(), 0.0);
  for (std::size_t r = 0; r < upstream.rows(); ++r) simd::axpy(1.0, upstream.row(r), g.db);
  g.dx = matmul_bt(upstream, spec.w);
  return g;
}

}  // namespace mcad::nk
