// SPDX-License-Identifier: Apache-2.0
#pragma once

// Hybrid feature extractor. A window (T x m) goes through
//   cnn:  parallel conv1d (one per kernel size) -> ReLU -> batch norm,
//         channel concat, linear projection to cnn_dim
//   rnn:  stacked bidirectional LSTM -> 2 * lstm_hidden
// and the two are concatenated per time step together with the broadcast
// context vector. Self-attention over the T time steps follows, and the
// attended rows are mean-pooled into one window descriptor.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mcad/numkit/numkit.hpp"
#include "mcad/rng.hpp"

namespace mcad {

struct ExtractorConfig {
  std::size_t channels = 9;
  std::size_t window = 10;
  std::vector<std::size_t> kernel_sizes{3, 5, 7};
  std::size_t branch_channels = 16;
  std::size_t cnn_dim = 64;
  std::size_t lstm_hidden = 128;
  std::size_t lstm_layers = 2;
  std::size_t context_dim = 64;
  std::size_t attn_dk = 64;
  std::size_t attn_dv = 128;
  double bn_epsilon = 1e-5;
  nk::BnMode bn_mode = nk::BnMode::kInference;

  std::size_t rnn_dim() const { return 2 * lstm_hidden; }
  std::size_t fused_dim() const { return cnn_dim + rnn_dim() + context_dim; }
  void validate() const;
};

struct ExtractorParams {
  std::vector<nk::ConvSpec> convs;
  std::vector<nk::BnParams> norms;
  nk::LinearSpec projection;
  nk::BiLstmSpec lstm;
  nk::AttnSpec attention;

  // Xavier-uniform weights, zero biases, forget-gate bias +1, identity norms.
  static ExtractorParams init(const ExtractorConfig& config, Rng& rng);
  // Every learnable value zero (gamma included); running stats are 0 / 1.
  static ExtractorParams zeros(const ExtractorConfig& config);

  using Visitor = std::function<void(const std::string& name, const std::vector<std::size_t>& shape,
                                     std::span<double> values)>;
  using ConstVisitor = std::function<void(const std::string& name, const std::vector<std::size_t>& shape,
                                          std::span<const double> values)>;
  // Trainable parameters in a fixed order.
  void for_each_param(const Visitor& f);
  void for_each_param(const ConstVisitor& f) const;
  // Non-trainable state (batch-norm running statistics).
  void for_each_buffer(const Visitor& f);
  void for_each_buffer(const ConstVisitor& f) const;
  std::size_t parameter_count() const;
};

struct CnnTrace {
  std::vector<nk::Tensor2> conv_out;  // pre-activation, per branch
  std::vector<nk::BnCache> bn;
  nk::Tensor2 concat;
};

struct ExtractorTrace {
  nk::Tensor2 window;
  CnnTrace cnn;
  nk::BiLstmTrace rnn;
  nk::AttnTrace attn;
};

struct Attended {
  nk::Tensor2 z_att;
  std::vector<double> pooled;
};

nk::Tensor2 cnn_branch(const nk::Tensor2& window, const ExtractorParams& params,
                       nk::BnMode mode, CnnTrace* trace = nullptr);
nk::Tensor2 rnn_branch(const nk::Tensor2& window, const ExtractorParams& params,
                       nk::BiLstmTrace* trace = nullptr);
// Row-wise [cnn | rnn | context].
nk::Tensor2 fuse(const nk::Tensor2& cnn_out, const nk::Tensor2& rnn_out, std::span<const double> context);
Attended attend(const nk::Tensor2& fused, const nk::AttnSpec& spec, nk::AttnTrace* trace = nullptr);

// Full forward pass to the pooled descriptor (length attn_dv).
std::vector<double> extract(const nk::Tensor2& window, std::span<const double> context,
                            const ExtractorParams& params, const ExtractorConfig& config,
                            ExtractorTrace* trace = nullptr);

// Accumulates d(pooled . upstream)/d(params) into `grads`.
void extractor_backward(const ExtractorTrace& trace, const ExtractorParams& params,
                        const ExtractorConfig& config, std::span<const double> upstream,
                        ExtractorParams& grads);
ExtractorParams extractor_backward(const ExtractorTrace& trace, const ExtractorParams& params,
                                   const ExtractorConfig& config, std::span<const double> upstream);

// Sets every batch-norm running mean/var to the population moments of its
// input over all rows of the given (normalized) windows.
void refresh_norm_statistics(ExtractorParams& params, std::span<const nk::Tensor2> windows);

// params += alpha * other, parameter by parameter.
void axpy_params(double alpha, const ExtractorParams& other, ExtractorParams& params);
void zero_params(ExtractorParams& params);

}  // namespace mcad
