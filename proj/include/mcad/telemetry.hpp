// SPDX-License-Identifier: Apache-2.0
#pragma once

// Telemetry data model, windowing and per-channel normalization.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcad/numkit/tensor.hpp"

namespace mcad {

enum class Label { kNormal, kAnomalous };

struct TelemetryRecord {
  std::int64_t timestamp = 0;  // epoch milliseconds
  std::string provider_id;
  std::string service_id;
  std::vector<double> metrics;
  std::vector<std::string> log_lines;
  std::optional<Label> label;

  friend bool operator==(const TelemetryRecord&, const TelemetryRecord&) = default;
};

struct WindowTensor {
  nk::Tensor2 values;  // T x m, row = time step
  std::int64_t start_timestamp = 0;
  std::size_t stride_origin = 0;  // index of the first record in the source stream
  std::optional<Label> label;
};

struct ChannelStats {
  std::vector<double> mean;
  std::vector<double> stddev;

  std::size_t channels() const { return mean.size(); }
};

inline constexpr double kStdFloor = 1e-6;

// Returns the record unchanged when it has `expected_channels` finite metrics.
const TelemetryRecord& validate_record(const TelemetryRecord& record, std::size_t expected_channels);

// Windows start at 0, stride, 2*stride, ... while the whole window fits.
// A window is anomalous iff any record in it is; unlabeled when no record
// carries a label.
std::vector<WindowTensor> build_windows(std::span<const TelemetryRecord> records,
                                        std::size_t window_len, std::size_t stride);

std::size_t window_count(std::size_t records, std::size_t window_len, std::size_t stride);

// Population mean/std of every channel over all rows of all windows.
ChannelStats fit_stats(std::span<const WindowTensor> training_windows, double std_floor = kStdFloor);
ChannelStats fit_stats(std::span<const TelemetryRecord> training_records, double std_floor = kStdFloor);

WindowTensor normalize(const WindowTensor& window, const ChannelStats& stats);
ChannelStats identity_stats(std::size_t channels);

}  // namespace mcad
