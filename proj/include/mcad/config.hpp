// SPDX-License-Identifier: Apache-2.0
#pragma once

// Pipeline configuration: every tunable default in one JSON document.
// Missing keys keep their defaults; unknown keys are rejected.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "mcad/detector.hpp"
#include "mcad/extractor.hpp"
#include "mcad/logsem.hpp"
#include "mcad/warning.hpp"

namespace mcad {

struct DataConfig {
  std::size_t train_stride = 5;
  // Windows containing an anomalous record are also taken at this stride so
  // that the rare class is not thinned out along with the normal one.
  std::size_t anomalous_stride = 1;
  std::size_t eval_stride = 1;
  // Leading fraction of the training stream used for SGD; the rest
  // calibrates the warning stage.
  double train_fraction = 0.75;
};

struct EvalConfig {
  std::size_t grace_steps = 50;
  double baseline_k = 3.0;
};

struct PipelineConfig {
  std::uint64_t seed = 42;
  DataConfig data;
  ExtractorConfig extractor;
  DetectorConfig detector;
  WarningConfig warning;
  logsem::LogSemConfig logsem;
  EvalConfig eval;

  void validate() const;
};

nlohmann::json to_json(const PipelineConfig& config);
PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace mcad
