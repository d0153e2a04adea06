// SPDX-License-Identifier: Apache-2.0

#include "mcad/numkit/batchnorm.hpp"

#include <cmath>

#include "mcad/error.hpp"

namespace mcad::nk {

BnParams BnParams::identity(std::size_t channels, double epsilon) {
  BnParams p;
  p.gamma.assign(channels, 1.0);
  p.beta.assign(channels, 0.0);
  p.running_mean.assign(channels, 0.0);
  p.running_var.assign(channels, 1.0);
  p.epsilon = epsilon;
  return p;
}

void column_moments(const Tensor2& x, std::vector<double>& mean, std::vector<double>& var) {
  const std::size_t n = x.rows();
  mean.assign(x.cols(), 0.0);
  var.assign(x.cols(), 0.0);
  if (n == 0) return;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) mean[c] += x(r, c);
  for (double& m : mean) m /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) {
      const double d = x(r, c) - mean[c];
      var[c] += d * d;
    }
  for (double& v : var) v /= static_cast<double>(n);
}

BnResult batchnorm_forward(const Tensor2& x, const BnParams& params, BnMode mode) {
  const std::size_t cols = x.cols();
  require_shape(params.gamma.size() == cols && params.beta.size() == cols, "batchnorm channels");
  BnResult res;
  res.cache.mode = mode;
  std::vector<double> mean, var;
  if (mode == BnMode::kTraining) {
    if (x.rows() < 2) throw Error(ErrorCode::ShapeMismatch, "batchnorm training needs >= 2 rows");
    column_moments(x, mean, var);
  } else {
    require_shape(params.running_mean.size() == cols && params.running_var.size() == cols,
                  "batchnorm running stats");
    mean = params.running_mean;
    var = params.running_var;
  }
  res.cache.inv_std.resize(cols);
  for (std::size_t c = 0; c < cols; ++c) res.cache.inv_std[c] = 1.0 / std::sqrt(var[c] + params.epsilon);

  res.cache.xhat = Tensor2(x.rows(), cols);
  res.y = Tensor2(x.rows(), cols);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double xh = (x(r, c) - mean[c]) * res.cache.inv_std[c];
      res.cache.xhat(r, c) = xh;
      res.y(r, c) = params.gamma[c] * xh + params.beta[c];
    }
  }
  return res;
}

BnGrads batchnorm_backward(const BnCache& cache, const BnParams& params, const Tensor2& upstream) {
  const Tensor2& xhat = cache.xhat;
  const std::size_t n = xhat.rows();
  const std::size_t cols = xhat.cols();
  require_shape(upstream.rows() == n && upstream.cols() == cols, "batchnorm upstream shape");

  BnGrads g;
  g.dgamma.assign(cols, 0.0);
  g.dbeta.assign(cols, 0.0);
  g.dx = Tensor2(n, cols);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      g.dgamma[c] += upstream(r, c) * xhat(r, c);
      g.dbeta[c] += upstream(r, c);
    }
  }

  if (cache.mode == BnMode::kInference) {
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        g.dx(r, c) = upstream(r, c) * params.gamma[c] * cache.inv_std[c];
    return g;
  }

  // dx = inv_std / n * (n * dxhat - sum(dxhat) - xhat * sum(dxhat * xhat)),
  // with dxhat = gamma * upstream.
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t c = 0; c < cols; ++c) {
    const double sum_dxhat = params.gamma[c] * g.dbeta[c];
    const double sum_dxhat_xhat = params.gamma[c] * g.dgamma[c];
    for (std::size_t r = 0; r < n; ++r) {
      const double dxhat = params.gamma[c] * upstream(r, c);
      g.dx(r, c) = cache.inv_std[c] * inv_n *
                   (static_cast<double>(n) * dxhat - sum_dxhat - xhat(r, c) * sum_dxhat_xhat);
    }
  }
  return g;
}

}  // namespace mcad::nk
