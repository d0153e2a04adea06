// SPDX-License-Identifier: Apache-2.0
#pragma once

// End-to-end orchestration: train on a labeled stream, score and warn on a
// new stream, evaluate against ground truth and the threshold baseline.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "mcad/checkpoint.hpp"
#include "mcad/config.hpp"
#include "mcad/evaluation.hpp"
#include "mcad/telemetry.hpp"
#include "mcad/warning.hpp"

namespace mcad {

// Normalized windows of a stream with their log context vectors.
struct PreparedWindows {
  std::vector<nk::Tensor2> windows;
  std::vector<std::vector<double>> contexts;
  std::vector<std::size_t> starts;  // index of each window's first record
  std::vector<bool> anomalous;      // window label (any anomalous record)
  logsem::ContextSource context_source = logsem::ContextSource::kEmpty;
};

PreparedWindows prepare_windows(std::span<const TelemetryRecord> records, const ChannelStats& stats,
                                logsem::ContextEncoder& encoder, std::size_t window_len, std::size_t stride);

// Chronological split: the leading train_fraction of the stream trains the
// model (windows every train_stride steps, plus anomalous windows every
// anomalous_stride steps); windows of the remainder at eval_stride calibrate
// the warning stage.
TrainedModel train_pipeline(std::span<const TelemetryRecord> records, PipelineConfig config, std::uint64_t seed);

struct Detection {
  std::vector<AlertDecision> decisions;  // one per window, stream order
  std::vector<std::size_t> window_starts;
  std::vector<std::size_t> alert_steps;  // decision step of every alerting window
  std::vector<bool> window_alerts;
};

// A window's decision step is the index of its last record.
Detection detect(const TrainedModel& model, std::span<const TelemetryRecord> records);

// JSON report with stable key order; contains no timing information.
nlohmann::ordered_json evaluate(const TrainedModel& model, std::span<const TelemetryRecord> records,
                                bool with_baseline);

struct SweepPoint {
  std::size_t lstm_hidden = 0;
  double seconds_per_window = 0.0;
  std::optional<double> mean_latency;
  std::optional<double> f1;
};

// Per-window scoring time for each hidden size (best of `repeats` passes
// over the stream's windows). With `train`, each size is trained on
// `train_records` and latency/F1 on `records` are recorded as well.
std::vector<SweepPoint> hidden_size_sweep(std::span<const TelemetryRecord> train_records,
                                          std::span<const TelemetryRecord> records, const PipelineConfig& config,
                                          std::span<const std::size_t> hidden_sizes, bool train, std::size_t repeats,
                                          std::uint64_t seed);
nlohmann::ordered_json to_json(std::span<const SweepPoint> sweep);

}  // namespace mcad
