// SPDX-License-Identifier: Apache-2.0
#pragma once

// Versioned JSON checkpoint of a trained pipeline. Parameter blocks are
// {name, shape, data} with row-major doubles; keys are emitted in sorted
// order so that load followed by save reproduces the file byte for byte.

#include <filesystem>
#include <string>

#include "json.hpp"
#include "mcad/config.hpp"
#include "mcad/detector.hpp"
#include "mcad/logsem.hpp"
#include "mcad/telemetry.hpp"
#include "mcad/warning.hpp"

namespace mcad {

inline constexpr int kCheckpointVersion = 1;

struct TrainedModel {
  PipelineConfig config;
  HybridModel model;
  logsem::TemplateMiner miner;
  ChannelStats stats;
  LikelihoodModel likelihood;
  TrainReport report;
};

std::string checkpoint_to_string(const TrainedModel& model);
TrainedModel checkpoint_from_string(const std::string& text);
void save_checkpoint(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_checkpoint(const std::filesystem::path& path);

}  // namespace mcad
