// SPDX-License-Identifier: Apache-2.0

#include "mcad/detector.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "mcad/error.hpp"
#include "mcad/simd/kernels.hpp"

namespace mcad {

namespace {

void require_label(int y) {
  if (y != kNormalLabel && y != kAnomalousLabel)
    throw Error(ErrorCode::InvalidLabel, "label must be +1 or -1, got " + std::to_string(y));
}

void require_batch(std::span<const std::vector<double>> z, std::span<const int> y) {
  if (z.empty()) throw Error(ErrorCode::EmptyBatch, "empty batch");
  nk::require_shape(z.size() == y.size(), "feature and label counts differ");
}

double half_norm_sq(std::span<const double> w) { return 0.5 * simd::dot(w, w); }

void require_both_classes(std::span<const int> y) {
  bool pos = false, neg = false;
  for (int v : y) {
    require_label(v);
    (v > 0 ? pos : neg) = true;
  }
  if (!pos || !neg) throw Error(ErrorCode::SingleClassData, "training data must contain both classes");
}

std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

}  // namespace

SvmParams SvmParams::zeros(std::size_t dim, double c, double learning_rate) {
  SvmParams p;
  p.w.assign(dim, 0.0);
  p.c = c;
  p.learning_rate = learning_rate;
  p.validate();
  return p;
}

void SvmParams::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "C must be positive");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw Error(ErrorCode::InvalidArgument, "learning rate must be non-negative");
}

double decision(std::span<const double> z, const SvmParams& params) {
  nk::require_shape(z.size() == params.w.size(), "decision: feature dimension");
  return simd::dot(params.w, z) + params.b;
}

double hinge(int y, double f) {
  require_label(y);
  return std::max(0.0, 1.0 - static_cast<double>(y) * f);
}

double objective(std::span<const std::vector<double>> z, std::span<const int> y, const SvmParams& params) {
  require_batch(z, y);
  double loss = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) loss += hinge(y[i], decision(z[i], params));
  return half_norm_sq(params.w) + params.c * loss;
}

namespace {

// Hinge part of the subgradient only: C * sum over violated samples of -y z.
double hinge_subgradient(std::span<const std::vector<double>> z, std::span<const int> y, const SvmParams& params,
                         std::vector<double>& dw, std::vector<bool>* violated) {
  require_batch(z, y);
  dw.assign(params.w.size(), 0.0);
  double db = 0.0;
  if (violated) violated->assign(z.size(), false);
  for (std::size_t i = 0; i < z.size(); ++i) {
    require_label(y[i]);
    const double margin = static_cast<double>(y[i]) * decision(z[i], params);
    if (margin < 1.0) {
      if (violated) (*violated)[i] = true;
      simd::axpy(-params.c * y[i], z[i], dw);
      db -= params.c * y[i];
    }
  }
  return db;
}

// w <- (1 - eta) w - eta * hinge_dw. Splitting off the regularizer keeps a
// step with no violations an exact multiplication by (1 - eta).
void apply_step(SvmParams& params, std::span<const double> hinge_dw, double hinge_db) {
  const double eta = params.learning_rate;
  const double shrink = 1.0 - eta;
  for (double& w : params.w) w *= shrink;
  simd::axpy(-eta, hinge_dw, params.w);
  params.b -= eta * hinge_db;
}

}  // namespace

SvmGradient svm_gradient(std::span<const std::vector<double>> z, std::span<const int> y,
                         const SvmParams& params) {
  SvmGradient g;
  g.db = hinge_subgradient(z, y, params, g.dw, &g.violated);
  simd::axpy(1.0, params.w, g.dw);
  return g;
}

void sgd_step(std::span<const std::vector<double>> z, std::span<const int> y, SvmParams& params) {
  std::vector<double> dw;
  const double db = hinge_subgradient(z, y, params, dw, nullptr);
  apply_step(params, dw, db);
}

RffMap RffMap::create(std::size_t input_dim, std::size_t features, double gamma, Rng& rng) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "RFF bandwidth must be positive");
  if (input_dim == 0 || features == 0) throw Error(ErrorCode::InvalidArgument, "RFF dimensions must be positive");
  RffMap m;
  m.gamma = gamma;
  m.omega = nk::Tensor2(features, input_dim);
  const double sd = std::sqrt(2.0 * gamma);
  for (double& v : m.omega.flat()) v = rng.normal(0.0, sd);
  m.phase.resize(features);
  for (double& v : m.phase) v = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return m;
}

std::vector<double> rff_transform(std::span<const double> z, const RffMap& map) {
  nk::require_shape(z.size() == map.input_dim(), "rff: input dimension");
  const double scale = std::sqrt(2.0 / static_cast<double>(map.output_dim()));
  std::vector<double> out(map.output_dim());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = scale * std::cos(simd::dot(map.omega.row(r), z) + map.phase[r]);
  return out;
}

std::vector<double> rff_backward(std::span<const double> z, const RffMap& map, std::span<const double> upstream) {
  nk::require_shape(z.size() == map.input_dim(), "rff: input dimension");
  nk::require_shape(upstream.size() == map.output_dim(), "rff: upstream dimension");
  const double scale = std::sqrt(2.0 / static_cast<double>(map.output_dim()));
  std::vector<double> dz(z.size(), 0.0);
  for (std::size_t r = 0; r < map.output_dim(); ++r) {
    const double s = -scale * std::sin(simd::dot(map.omega.row(r), z) + map.phase[r]) * upstream[r];
    simd::axpy(s, map.omega.row(r), dz);
  }
  return dz;
}

std::string_view to_string(SvmKernel kernel) { return kernel == SvmKernel::kLinear ? "linear" : "rff"; }

SvmKernel svm_kernel_from_string(std::string_view name) {
  if (name == "linear") return SvmKernel::kLinear;
  if (name == "rff" || name == "rbf") return SvmKernel::kRff;
  throw Error(ErrorCode::InvalidArgument, "unknown SVM kernel '" + std::string(name) + "'");
}

void DetectorConfig::validate() const {
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "C must be positive");
  if (!(learning_rate >= 0.0)) throw Error(ErrorCode::InvalidArgument, "learning rate must be non-negative");
  if (batch_size == 0) throw Error(ErrorCode::InvalidArgument, "batch size must be positive");
  if (kernel == SvmKernel::kRff && rff_dim == 0) throw Error(ErrorCode::InvalidArgument, "RFF dimension must be positive");
  if (rff_gamma < 0.0) throw Error(ErrorCode::InvalidArgument, "RFF bandwidth must be non-negative");
  if (!(extractor_lr_scale >= 0.0)) throw Error(ErrorCode::InvalidArgument, "extractor lr scale must be non-negative");
}

TrainReport train_linear(std::span<const std::vector<double>> z, std::span<const int> y, SvmParams& params,
                         std::size_t epochs, std::size_t batch_size, std::uint64_t seed) {
  require_batch(z, y);
  require_both_classes(y);
  if (batch_size == 0) throw Error(ErrorCode::InvalidArgument, "batch size must be positive");
  params.validate();
  TrainReport report;
  report.seed = seed;
  Rng rng = Rng(seed).fork(4);
  auto order = iota_indices(z.size());
  std::vector<std::vector<double>> bz;
  std::vector<int> by;
  for (std::size_t e = 0; e < epochs; ++e) {
    rng.shuffle(std::span(order));
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t end = std::min(order.size(), start + batch_size);
      bz.clear();
      by.clear();
      for (std::size_t i = start; i < end; ++i) {
        bz.push_back(z[order[i]]);
        by.push_back(y[order[i]]);
      }
      sgd_step(bz, by, params);
    }
    const double obj = objective(z, y, params);
    if (!std::isfinite(obj)) throw Error(ErrorCode::NonFiniteLoss, "objective diverged in epoch " + std::to_string(e));
    report.objectives.push_back(obj);
  }
  report.epochs = epochs;
  report.final_objective = report.objectives.empty() ? objective(z, y, params) : report.objectives.back();
  return report;
}

HybridModel HybridModel::init(const ExtractorConfig& extractor_config, const DetectorConfig& detector_config,
                              std::uint64_t seed) {
  extractor_config.validate();
  detector_config.validate();
  HybridModel m;
  m.extractor_config = extractor_config;
  Rng root(seed);
  Rng init_rng = root.fork(5);
  m.extractor = ExtractorParams::init(extractor_config, init_rng);
  std::size_t dim = extractor_config.attn_dv;
  if (detector_config.kernel == SvmKernel::kRff) {
    const double gamma = detector_config.rff_gamma > 0.0 ? detector_config.rff_gamma : 1.0 / static_cast<double>(dim);
    Rng rff_rng = root.fork(6);
    m.rff = RffMap::create(dim, detector_config.rff_dim, gamma, rff_rng);
    dim = detector_config.rff_dim;
  }
  m.svm = SvmParams::zeros(dim, detector_config.c, detector_config.learning_rate);
  return m;
}

std::vector<double> features(const nk::Tensor2& window, std::span<const double> context, const HybridModel& model) {
  std::vector<double> pooled = extract(window, context, model.extractor, model.extractor_config);
  if (model.rff) return rff_transform(pooled, *model.rff);
  return pooled;
}

double score(const nk::Tensor2& window, std::span<const double> context, const HybridModel& model) {
  return decision(features(window, context, model), model.svm);
}

namespace {

void refresh_norms(HybridModel& model, std::span<const TrainingSample> samples) {
  if (model.extractor_config.bn_mode != nk::BnMode::kInference) return;
  std::vector<nk::Tensor2> windows;
  windows.reserve(samples.size());
  for (const auto& s : samples) windows.push_back(s.window);
  refresh_norm_statistics(model.extractor, windows);
}

TrainReport train_frozen(HybridModel& model, std::span<const TrainingSample> samples, const DetectorConfig& config,
                         std::uint64_t seed) {
  refresh_norms(model, samples);
  std::vector<std::vector<double>> z;
  std::vector<int> y;
  for (const auto& s : samples) {
    z.push_back(features(s.window, s.context, model));
    y.push_back(s.y);
  }
  return train_linear(z, y, model.svm, config.epochs, config.batch_size, seed);
}

}  // namespace

TrainReport train(HybridModel& model, std::span<const TrainingSample> samples, const DetectorConfig& config,
                  std::uint64_t seed) {
  config.validate();
  if (samples.empty()) throw Error(ErrorCode::EmptyBatch, "no training samples");
  {
    std::vector<int> labels;
    for (const auto& s : samples) labels.push_back(s.y);
    require_both_classes(labels);
  }
  model.svm.c = config.c;
  model.svm.learning_rate = config.learning_rate;
  model.svm.validate();
  if (!config.joint) return train_frozen(model, samples, config, seed);

  TrainReport report;
  report.seed = seed;
  Rng rng = Rng(seed).fork(4);
  auto order = iota_indices(samples.size());
  std::vector<double> losses(samples.size());
  ExtractorParams grads = ExtractorParams::zeros(model.extractor_config);
  const double eta = config.learning_rate;
  const double c = config.c;

  for (std::size_t e = 0; e < config.epochs; ++e) {
    refresh_norms(model, samples);
    rng.shuffle(std::span(order));
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::vector<double> dw(model.svm.w.size(), 0.0);
      double db = 0.0;
      zero_params(grads);
      bool any_violation = false;
      for (std::size_t i = start; i < end; ++i) {
        const TrainingSample& s = samples[order[i]];
        ExtractorTrace trace;
        std::vector<double> pooled = extract(s.window, s.context, model.extractor, model.extractor_config, &trace);
        std::vector<double> feat = model.rff ? rff_transform(pooled, *model.rff) : pooled;
        const double f = decision(feat, model.svm);
        if (!std::isfinite(f))
          throw Error(ErrorCode::NonFiniteLoss, "non-finite score in epoch " + std::to_string(e));
        losses[order[i]] = hinge(s.y, f);
        if (static_cast<double>(s.y) * f >= 1.0) continue;
        any_violation = true;
        const double coeff = -c * static_cast<double>(s.y);
        simd::axpy(coeff, feat, dw);
        db += coeff;
        if (config.extractor_lr_scale > 0.0) {
          std::vector<double> upstream(model.svm.w.size());
          for (std::size_t k = 0; k < upstream.size(); ++k) upstream[k] = coeff * model.svm.w[k];
          if (model.rff) upstream = rff_backward(pooled, *model.rff, upstream);
          extractor_backward(trace, model.extractor, model.extractor_config, upstream, grads);
        }
      }
      apply_step(model.svm, dw, db);
      if (any_violation && config.extractor_lr_scale > 0.0)
        axpy_params(-eta * config.extractor_lr_scale, grads, model.extractor);
    }
    const double obj = half_norm_sq(model.svm.w) + c * std::accumulate(losses.begin(), losses.end(), 0.0);
    if (!std::isfinite(obj)) throw Error(ErrorCode::NonFiniteLoss, "objective diverged in epoch " + std::to_string(e));
    report.objectives.push_back(obj);
  }
  refresh_norms(model, samples);
  report.epochs = config.epochs;
  report.final_objective = report.objectives.empty() ? 0.0 : report.objectives.back();
  return report;
}

}  // namespace mcad
