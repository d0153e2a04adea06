// SPDX-License-Identifier: Apache-2.0

#include "mcad/numkit/attention.hpp"

#include <cmath>

#include "mcad/numkit/activations.hpp"
#include "mcad/simd/kernels.hpp"

namespace mcad::nk {

AttnSpec AttnSpec::zeros(std::size_t dim, std::size_t dk, std::size_t dv) {
  return {Tensor2(dim, dk), Tensor2(dim, dk), Tensor2(dim, dv)};
}

void AttnSpec::validate() const {
  require_shape(wk.rows() == wq.rows() && wv.rows() == wq.rows(), "attention weight rows");
  require_shape(wk.cols() == wq.cols(), "attention query/key width");
  require_shape(wq.cols() > 0, "attention d_k");
}

AttnTrace attention_forward_trace(const Tensor2& z, const AttnSpec& spec) {
  spec.validate();
  require_shape(z.cols() == spec.input_dim(), "attention input width");
  AttnTrace tr;
  tr.z = z;
  tr.q = matmul(z, spec.wq);
  tr.k = matmul(z, spec.wk);
  tr.v = matmul(z, spec.wv);
  tr.weights = matmul_bt(tr.q, tr.k);
  simd::scale(1.0 / std::sqrt(static_cast<double>(spec.dk())), tr.weights.flat());
  softmax_rows_inplace(tr.weights);
  tr.output = matmul(tr.weights, tr.v);
  return tr;
}

Tensor2 attention_forward(const Tensor2& z, const AttnSpec& spec) {
  return attention_forward_trace(z, spec).output;
}

AttnGrads attention_backward(const AttnTrace& tr, const AttnSpec& spec, const Tensor2& upstream) {
  const std::size_t n = tr.z.rows();
  require_shape(upstream.rows() == n && upstream.cols() == spec.dv(), "attention upstream shape");

  // dA = dOut V^T ; dV = A^T dOut
  Tensor2 dweights = matmul_bt(upstream, tr.v);
  Tensor2 dv(n, spec.dv());
  matmul_at_acc(tr.weights, upstream, dv);

  // Softmax Jacobian per row, folded with the 1/sqrt(d_k) scale.
  const double inv_scale = 1.0 / std::sqrt(static_cast<double>(spec.dk()));
  Tensor2 dscores(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double inner = simd::dot(dweights.row(i), tr.weights.row(i));
    for (std::size_t j = 0; j < n; ++j) {
      dscores(i, j) = tr.weights(i, j) * (dweights(i, j) - inner) * inv_scale;
    }
  }

  // dQ = dS K ; dK = dS^T Q
  Tensor2 dq = matmul(dscores, tr.k);
  Tensor2 dk(n, spec.dk());
  matmul_at_acc(dscores, tr.q, dk);

  AttnGrads g;
  g.dwq = Tensor2(spec.wq.rows(), spec.wq.cols());
  g.dwk = Tensor2(spec.wk.rows(), spec.wk.cols());
  g.dwv = Tensor2(spec.wv.rows(), spec.wv.cols());
  matmul_at_acc(tr.z, dq, g.dwq);
  matmul_at_acc(tr.z, dk, g.dwk);
  matmul_at_acc(tr.z, dv, g.dwv);

  g.dz = matmul_bt(dq, spec.wq);
  const Tensor2 dz_k = matmul_bt(dk, spec.wk);
  const Tensor2 dz_v = matmul_bt(dv, spec.wv);
  simd::axpy(1.0, dz_k.flat(), g.dz.flat());
  simd::axpy(1.0, dz_v.flat(), g.dz.flat());
  return g;
}

AttnGrads attention_backward(const Tensor2& z, const AttnSpec& spec, const Tensor2& upstream) {
  return attention_backward(attention_forward_trace(z, spec), spec, upstream);
}

}  // namespace mcad::nk
