// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "mcad/numkit/tensor.hpp"

namespace mcad::nk {

enum class BnMode {
  kTraining,   // statistics from the rows of the current input
  kInference,  // stored running statistics
};

struct BnParams {
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<double> running_mean;
  std::vector<double> running_var;
  double epsilon = 1e-5;

  static BnParams identity(std::size_t channels, double epsilon = 1e-5);
  std::size_t channels() const { return gamma.size(); }
};

struct BnCache {
  BnMode mode = BnMode::kInference;
  Tensor2 xhat;
  std::vector<double> inv_std;
};

struct BnResult {
  Tensor2 y;
  BnCache cache;
};

struct BnGrads {
  Tensor2 dx;
  std::vector<double> dgamma;
  std::vector<double> dbeta;
};

// Per-column standardization over rows, then y = gamma * xhat + beta.
BnResult batchnorm_forward(const Tensor2& x, const BnParams& params, BnMode mode);
BnGrads batchnorm_backward(const BnCache& cache, const BnParams& params, const Tensor2& upstream);

// Population mean and variance of each column (used to refresh running stats).
void column_moments(const Tensor2& x, std::vector<double>& mean, std::vector<double>& var);

}  // namespace mcad::nk
