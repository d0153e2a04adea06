// SPDX-License-Identifier: Apache-2.0

#include "mcad/extractor.hpp"

#include <algorithm>

#include "mcad/error.hpp"
#include "mcad/simd/kernels.hpp"

namespace mcad {

using nk::Tensor2;

void ExtractorConfig::validate() const {
  auto positive = [](std::size_t v, const char* what) {
    if (v == 0) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be positive");
  };
  positive(channels, "channels");
  positive(window, "window");
  positive(branch_channels, "branch_channels");
  positive(cnn_dim, "cnn_dim");
  positive(lstm_hidden, "lstm_hidden");
  positive(lstm_layers, "lstm_layers");
  positive(attn_dk, "attn_dk");
  positive(attn_dv, "attn_dv");
  if (kernel_sizes.empty()) throw Error(ErrorCode::InvalidArgument, "no cnn kernel sizes");
  for (auto k : kernel_sizes)
    if (k % 2 == 0) throw Error(ErrorCode::InvalidArgument, "cnn kernel sizes must be odd");
}

ExtractorParams ExtractorParams::zeros(const ExtractorConfig& cfg) {
  cfg.validate();
  ExtractorParams p;
  for (auto k : cfg.kernel_sizes) {
    p.convs.push_back(nk::ConvSpec::zeros(k, cfg.channels, cfg.branch_channels));
    p.norms.push_back(nk::BnParams::identity(cfg.branch_channels, cfg.bn_epsilon));
    std::fill(p.norms.back().gamma.begin(), p.norms.back().gamma.end(), 0.0);
  }
  p.projection = nk::LinearSpec::zeros(cfg.kernel_sizes.size() * cfg.branch_channels, cfg.cnn_dim);
  std::size_t in = cfg.channels;
  for (std::size_t l = 0; l < cfg.lstm_layers; ++l) {
    p.lstm.layers.push_back({nk::LstmSpec::zeros(in, cfg.lstm_hidden), nk::LstmSpec::zeros(in, cfg.lstm_hidden)});
    in = 2 * cfg.lstm_hidden;
  }
  p.attention = nk::AttnSpec::zeros(cfg.fused_dim(), cfg.attn_dk, cfg.attn_dv);
  return p;
}

ExtractorParams ExtractorParams::init(const ExtractorConfig& cfg, Rng& rng) {
  ExtractorParams p = zeros(cfg);
  for (auto& norm : p.norms) std::fill(norm.gamma.begin(), norm.gamma.end(), 1.0);
  for (auto& conv : p.convs) {
    nk::xavier_uniform(conv.weights, conv.in_channels * conv.kernel_size,
                       conv.out_channels * conv.kernel_size, rng);
  }
  nk::xavier_uniform(p.projection.w.flat(), p.projection.w.rows(), p.projection.w.cols(), rng);
  for (auto& layer : p.lstm.layers) {
    for (nk::LstmSpec* spec : {&layer.forward, &layer.backward}) {
      nk::xavier_uniform(spec->w.flat(), spec->w.cols(), spec->w.rows(), rng);
      nk::xavier_uniform(spec->u.flat(), spec->u.cols(), spec->u.rows(), rng);
      std::fill(spec->b.begin() + static_cast<std::ptrdiff_t>(spec->hidden_dim),
                spec->b.begin() + static_cast<std::ptrdiff_t>(2 * spec->hidden_dim), 1.0);
    }
  }
  for (Tensor2* w : {&p.attention.wq, &p.attention.wk, &p.attention.wv}) {
    nk::xavier_uniform(w->flat(), w->rows(), w->cols(), rng);
  }
  return p;
}

namespace {

using Shape = std::vector<std::size_t>;

template <typename P, typename F>
void visit_params(P& p, F&& f) {
  for (std::size_t i = 0; i < p.convs.size(); ++i) {
    auto& c = p.convs[i];
    const std::string base = "cnn.conv" + std::to_string(i);
    f(base + ".weight", Shape{c.out_channels, c.in_channels, c.kernel_size}, std::span(c.weights));
    f(base + ".bias", Shape{c.out_channels}, std::span(c.bias));
  }
  for (std::size_t i = 0; i < p.norms.size(); ++i) {
    auto& n = p.norms[i];
    const std::string base = "cnn.norm" + std::to_string(i);
    f(base + ".gamma", Shape{n.gamma.size()}, std::span(n.gamma));
    f(base + ".beta", Shape{n.beta.size()}, std::span(n.beta));
  }
  f("cnn.proj.weight", Shape{p.projection.w.rows(), p.projection.w.cols()}, p.projection.w.flat());
  f("cnn.proj.bias", Shape{p.projection.b.size()}, std::span(p.projection.b));
  for (std::size_t l = 0; l < p.lstm.layers.size(); ++l) {
    auto& layer = p.lstm.layers[l];
    const std::string base = "rnn.l" + std::to_string(l);
    auto lstm = [&](auto& spec, const char* dir) {
      f(base + dir + ".w", Shape{spec.w.rows(), spec.w.cols()}, spec.w.flat());
      f(base + dir + ".u", Shape{spec.u.rows(), spec.u.cols()}, spec.u.flat());
      f(base + dir + ".b", Shape{spec.b.size()}, std::span(spec.b));
    };
    lstm(layer.forward, ".fwd");
    lstm(layer.backward, ".bwd");
  }
  auto& a = p.attention;
  f("attn.wq", Shape{a.wq.rows(), a.wq.cols()}, a.wq.flat());
  f("attn.wk", Shape{a.wk.rows(), a.wk.cols()}, a.wk.flat());
  f("attn.wv", Shape{a.wv.rows(), a.wv.cols()}, a.wv.flat());
}

template <typename P, typename F>
void visit_buffers(P& p, F&& f) {
  for (std::size_t i = 0; i < p.norms.size(); ++i) {
    auto& n = p.norms[i];
    const std::string base = "cnn.norm" + std::to_string(i);
    f(base + ".running_mean", Shape{n.running_mean.size()}, std::span(n.running_mean));
    f(base + ".running_var", Shape{n.running_var.size()}, std::span(n.running_var));
  }
}

}  // namespace

void ExtractorParams::for_each_param(const Visitor& f) { visit_params(*this, f); }
void ExtractorParams::for_each_param(const ConstVisitor& f) const { visit_params(*this, f); }
void ExtractorParams::for_each_buffer(const Visitor& f) { visit_buffers(*this, f); }
void ExtractorParams::for_each_buffer(const ConstVisitor& f) const { visit_buffers(*this, f); }

std::size_t ExtractorParams::parameter_count() const {
  std::size_t n = 0;
  for_each_param(ConstVisitor([&](const std::string&, const Shape&, std::span<const double> v) { n += v.size(); }));
  return n;
}

void axpy_params(double alpha, const ExtractorParams& other, ExtractorParams& params) {
  std::vector<std::span<const double>> src;
  other.for_each_param(ExtractorParams::ConstVisitor(
      [&](const std::string&, const Shape&, std::span<const double> v) { src.push_back(v); }));
  std::size_t i = 0;
  params.for_each_param(ExtractorParams::Visitor([&](const std::string& name, const Shape&, std::span<double> v) {
    nk::require_shape(i < src.size() && src[i].size() == v.size(), "parameter layout mismatch at " + name);
    simd::axpy(alpha, src[i++], v);
  }));
}

void zero_params(ExtractorParams& params) {
  params.for_each_param(ExtractorParams::Visitor(
      [](const std::string&, const Shape&, std::span<double> v) { std::fill(v.begin(), v.end(), 0.0); }));
}

// ---------------------------------------------------------------------------

Tensor2 cnn_branch(const Tensor2& window, const ExtractorParams& params, nk::BnMode mode, CnnTrace* trace) {
  std::vector<Tensor2> normalized;
  normalized.reserve(params.convs.size());
  for (std::size_t b = 0; b < params.convs.size(); ++b) {
    Tensor2 conv = nk::conv1d_forward(window, params.convs[b]);
    Tensor2 act = nk::relu(conv);
    auto bn = nk::batchnorm_forward(act, params.norms[b], mode);
    normalized.push_back(std::move(bn.y));
    if (trace) {
      trace->conv_out.push_back(std::move(conv));
      trace->bn.push_back(std::move(bn.cache));
    }
  }
  std::vector<const Tensor2*> parts;
  for (const auto& n : normalized) parts.push_back(&n);
  Tensor2 concat = nk::hconcat(parts);
  Tensor2 out = nk::linear_forward(concat, params.projection);
  if (trace) trace->concat = std::move(concat);
  return out;
}

Tensor2 rnn_branch(const Tensor2& window, const ExtractorParams& params, nk::BiLstmTrace* trace) {
  if (trace) {
    *trace = nk::bilstm_forward_trace(window, params.lstm);
    return trace->output;
  }
  return nk::bilstm_forward(window, params.lstm);
}

Tensor2 fuse(const Tensor2& cnn_out, const Tensor2& rnn_out, std::span<const double> context) {
  nk::require_shape(cnn_out.rows() == rnn_out.rows(), "fuse row count");
  Tensor2 out(cnn_out.rows(), cnn_out.cols() + rnn_out.cols() + context.size());
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto dst = out.row(r).begin();
    dst = std::copy(cnn_out.row(r).begin(), cnn_out.row(r).end(), dst);
    dst = std::copy(rnn_out.row(r).begin(), rnn_out.row(r).end(), dst);
    std::copy(context.begin(), context.end(), dst);
  }
  return out;
}

Attended attend(const Tensor2& fused, const nk::AttnSpec& spec, nk::AttnTrace* trace) {
  Attended out;
  if (trace) {
    *trace = nk::attention_forward_trace(fused, spec);
    out.z_att = trace->output;
  } else {
    out.z_att = nk::attention_forward(fused, spec);
  }
  out.pooled = nk::column_mean(out.z_att);
  return out;
}

std::vector<double> extract(const Tensor2& window, std::span<const double> context,
                            const ExtractorParams& params, const ExtractorConfig& config,
                            ExtractorTrace* trace) {
  nk::require_shape(window.cols() == config.channels, "window channel count");
  nk::require_shape(context.size() == config.context_dim, "context dimension");
  if (trace) trace->window = window;
  Tensor2 cnn = cnn_branch(window, params, config.bn_mode, trace ? &trace->cnn : nullptr);
  Tensor2 rnn = rnn_branch(window, params, trace ? &trace->rnn : nullptr);
  Tensor2 fused = fuse(cnn, rnn, context);
  return attend(fused, params.attention, trace ? &trace->attn : nullptr).pooled;
}

void extractor_backward(const ExtractorTrace& trace, const ExtractorParams& params,
                        const ExtractorConfig& config, std::span<const double> upstream,
                        ExtractorParams& grads) {
  nk::require_shape(upstream.size() == params.attention.dv(), "extractor upstream size");
  const std::size_t steps = trace.window.rows();

  // Mean pooling spreads the upstream evenly over the attended rows.
  Tensor2 dz_att(steps, upstream.size());
  for (std::size_t r = 0; r < steps; ++r)
    for (std::size_t c = 0; c < upstream.size(); ++c) dz_att(r, c) = upstream[c] / static_cast<double>(steps);

  auto attn = nk::attention_backward(trace.attn, params.attention, dz_att);
  simd::axpy(1.0, attn.dwq.flat(), grads.attention.wq.flat());
  simd::axpy(1.0, attn.dwk.flat(), grads.attention.wk.flat());
  simd::axpy(1.0, attn.dwv.flat(), grads.attention.wv.flat());

  const std::size_t cnn_dim = params.projection.w.cols();
  const std::size_t rnn_dim = params.lstm.output_dim();
  nk::require_shape(attn.dz.cols() == cnn_dim + rnn_dim + config.context_dim, "fused width");

  // RNN branch.
  const Tensor2 drnn = nk::column_slice(attn.dz, cnn_dim, rnn_dim);
  auto lstm_acc = nk::BiLstmGrads::zeros_like(params.lstm);
  nk::bilstm_backward(trace.rnn, params.lstm, drnn, lstm_acc);
  for (std::size_t l = 0; l < grads.lstm.layers.size(); ++l) {
    auto& layer = grads.lstm.layers[l];
    std::size_t d = 0;
    for (nk::LstmSpec* spec : {&layer.forward, &layer.backward}) {
      const auto& g = lstm_acc.layers[l][d++];
      simd::axpy(1.0, g.dw.flat(), spec->w.flat());
      simd::axpy(1.0, g.du.flat(), spec->u.flat());
      simd::axpy(1.0, g.db, spec->b);
    }
  }

  // CNN branch.
  const Tensor2 dcnn = nk::column_slice(attn.dz, 0, cnn_dim);
  auto proj = nk::linear_backward(trace.cnn.concat, params.projection, dcnn);
  simd::axpy(1.0, proj.dw.flat(), grads.projection.w.flat());
  simd::axpy(1.0, proj.db, grads.projection.b);

  std::size_t offset = 0;
  for (std::size_t b = 0; b < params.convs.size(); ++b) {
    const std::size_t width = params.convs[b].out_channels;
    const Tensor2 dbn_out = nk::column_slice(proj.dx, offset, width);
    offset += width;
    auto bn = nk::batchnorm_backward(trace.cnn.bn[b], params.norms[b], dbn_out);
    simd::axpy(1.0, bn.dgamma, grads.norms[b].gamma);
    simd::axpy(1.0, bn.dbeta, grads.norms[b].beta);
    const Tensor2 dconv = nk::relu_backward(trace.cnn.conv_out[b], bn.dx);
    auto conv = nk::conv1d_backward(trace.window, params.convs[b], dconv);
    simd::axpy(1.0, conv.dw, grads.convs[b].weights);
    simd::axpy(1.0, conv.db, grads.convs[b].bias);
  }
}

ExtractorParams extractor_backward(const ExtractorTrace& trace, const ExtractorParams& params,
                                   const ExtractorConfig& config, std::span<const double> upstream) {
  ExtractorParams grads = params;
  zero_params(grads);
  extractor_backward(trace, params, config, upstream, grads);
  return grads;
}

void refresh_norm_statistics(ExtractorParams& params, std::span<const Tensor2> windows) {
  if (windows.empty()) return;
  for (std::size_t b = 0; b < params.convs.size(); ++b) {
    const std::size_t width = params.convs[b].out_channels;
    std::vector<double> sum(width, 0.0), sum_sq(width, 0.0);
    std::size_t rows = 0;
    for (const auto& w : windows) {
      const Tensor2 act = nk::relu(nk::conv1d_forward(w, params.convs[b]));
      for (std::size_t r = 0; r < act.rows(); ++r)
        for (std::size_t c = 0; c < width; ++c) {
          sum[c] += act(r, c);
          sum_sq[c] += act(r, c) * act(r, c);
        }
      rows += act.rows();
    }
    auto& norm = params.norms[b];
    for (std::size_t c = 0; c < width; ++c) {
      const double mean = sum[c] / static_cast<double>(rows);
      norm.running_mean[c] = mean;
      norm.running_var[c] = std::max(0.0, sum_sq[c] / static_cast<double>(rows) - mean * mean);
    }
  }
}

}  // namespace mcad
