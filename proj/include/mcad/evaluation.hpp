// SPDX-License-Identifier: Apache-2.0
#pragma once

// Evaluation: confusion-based metrics, detection latency against fault
// intervals, and the static k-sigma threshold baseline.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "mcad/ingest.hpp"
#include "mcad/telemetry.hpp"

namespace mcad {

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Zero denominators give 0.
ClassMetrics class_metrics(std::size_t tp, std::size_t fp, std::size_t fn);

struct MetricsReport {
  Confusion confusion;     // positive class = anomalous
  ClassMetrics anomalous;
  ClassMetrics normal;
};

MetricsReport metrics(const std::vector<bool>& predicted, const std::vector<bool>& truth);

struct FaultLatency {
  ingest::Interval fault;
  std::optional<std::size_t> latency;  // empty when missed
};

struct LatencyReport {
  std::vector<FaultLatency> faults;
  std::size_t detected = 0;
  std::size_t missed = 0;
  std::size_t false_alarms = 0;
  std::optional<double> mean;
  std::optional<double> median;
};

// `alert_steps` are the stream steps at which alerts fired. A fault is
// detected by the first alert in [start, start + grace]; alerts outside
// every such range are false alarms.
LatencyReport detection_latency(std::span<const std::size_t> alert_steps, std::span<const ingest::Interval> faults,
                                std::size_t grace);

// Per-step flags: any channel at least k standard deviations from its mean.
std::vector<bool> threshold_baseline(std::span<const TelemetryRecord> records, const ChannelStats& stats, double k);

// A window is flagged iff any of its steps is.
std::vector<bool> window_flags_from_steps(const std::vector<bool>& steps, std::size_t window_len, std::size_t stride);

nlohmann::ordered_json to_json(const MetricsReport& m);
nlohmann::ordered_json to_json(const LatencyReport& l);

}  // namespace mcad
