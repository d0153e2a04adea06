// SPDX-License-Identifier: Apache-2.0
#pragma once

// Soft-margin SVM head on top of the extractor. Labels are +1 (normal) and
// -1 (anomalous); a negative score means the window looks anomalous.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcad/extractor.hpp"
#include "mcad/numkit/tensor.hpp"
#include "mcad/rng.hpp"

namespace mcad {

inline constexpr int kNormalLabel = +1;
inline constexpr int kAnomalousLabel = -1;

struct SvmParams {
  std::vector<double> w;
  double b = 0.0;
  double c = 1.0;
  double learning_rate = 0.01;

  static SvmParams zeros(std::size_t dim, double c = 1.0, double learning_rate = 0.01);
  void validate() const;
};

double decision(std::span<const double> z, const SvmParams& params);
double hinge(int y, double f);

// 1/2 |w|^2 + C * sum max(0, 1 - y f(z)).
double objective(std::span<const std::vector<double>> z, std::span<const int> y, const SvmParams& params);

struct SvmGradient {
  std::vector<double> dw;
  double db = 0.0;
  std::vector<bool> violated;  // per sample, margin strictly below 1
};
SvmGradient svm_gradient(std::span<const std::vector<double>> z, std::span<const int> y,
                         const SvmParams& params);
void sgd_step(std::span<const std::vector<double>> z, std::span<const int> y, SvmParams& params);

// Random Fourier features for the RBF kernel exp(-gamma |x - y|^2).
struct RffMap {
  nk::Tensor2 omega;  // D x input_dim
  std::vector<double> phase;
  double gamma = 1.0;

  static RffMap create(std::size_t input_dim, std::size_t features, double gamma, Rng& rng);
  std::size_t input_dim() const { return omega.cols(); }
  std::size_t output_dim() const { return omega.rows(); }
};

std::vector<double> rff_transform(std::span<const double> z, const RffMap& map);
// d(rff(z) . upstream)/dz
std::vector<double> rff_backward(std::span<const double> z, const RffMap& map, std::span<const double> upstream);

enum class SvmKernel { kLinear, kRff };
std::string_view to_string(SvmKernel kernel);
SvmKernel svm_kernel_from_string(std::string_view name);

struct DetectorConfig {
  SvmKernel kernel = SvmKernel::kLinear;
  std::size_t rff_dim = 1024;
  double rff_gamma = 0.0;  // 0 selects 1 / feature dim
  double c = 1.0;
  double learning_rate = 0.01;
  std::size_t batch_size = 32;
  std::size_t epochs = 100;
  bool joint = true;
  double extractor_lr_scale = 1.0;

  void validate() const;
};

struct TrainReport {
  std::vector<double> objectives;
  double final_objective = 0.0;
  std::size_t epochs = 0;
  std::uint64_t seed = 0;
};

// Linear SVM on fixed features. The per-epoch objective is evaluated on the
// whole set after the epoch.
TrainReport train_linear(std::span<const std::vector<double>> z, std::span<const int> y, SvmParams& params,
                         std::size_t epochs, std::size_t batch_size, std::uint64_t seed);

struct HybridModel {
  ExtractorConfig extractor_config;
  ExtractorParams extractor;
  std::optional<RffMap> rff;
  SvmParams svm;

  static HybridModel init(const ExtractorConfig& extractor_config, const DetectorConfig& detector_config,
                          std::uint64_t seed);
  std::size_t feature_dim() const { return svm.w.size(); }
};

struct TrainingSample {
  nk::Tensor2 window;
  std::vector<double> context;
  int y = kNormalLabel;
};

// Window -> pooled descriptor -> optional RFF -> SVM features.
std::vector<double> features(const nk::Tensor2& window, std::span<const double> context, const HybridModel& model);
double score(const nk::Tensor2& window, std::span<const double> context, const HybridModel& model);

// Shuffled minibatch SGD over the SVM and, when `joint`, the extractor. With
// inference-mode batch norm the running statistics are refreshed from all
// training windows before every epoch. The per-epoch objective is
// 1/2 |w|^2 at the end of the epoch plus C times the hinge values seen during
// it (frozen extractor: the objective of the whole set after the epoch).
TrainReport train(HybridModel& model, std::span<const TrainingSample> samples, const DetectorConfig& config,
                  std::uint64_t seed);

}  // namespace mcad
