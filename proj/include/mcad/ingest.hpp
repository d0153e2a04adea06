// SPDX-License-Identifier: Apache-2.0
#pragma once

// Telemetry file readers/writers (CSV, JSON lines) and the labeled synthetic
// multi-cloud generator.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mcad/telemetry.hpp"

namespace mcad::ingest {

// Column/field names understood by the readers. Timestamps are epoch
// milliseconds. In CSV, the log column holds the record's log lines joined by
// `log_separator`. When `metric_columns` is empty every CSV column that is not
// one of the named columns is a metric, in header order.
struct SchemaConfig {
  std::string timestamp_column = "ts";
  std::string provider_column = "provider";
  std::string service_column = "service";
  std::string label_column = "label";
  std::string log_column = "logs";
  std::vector<std::string> metric_columns;
  std::size_t expected_channels = 0;  // 0: taken from the header / first record
  char log_separator = '|';
};

std::vector<TelemetryRecord> parse_csv(std::istream& in, const SchemaConfig& schema = {});
std::vector<TelemetryRecord> parse_jsonl(std::istream& in, const SchemaConfig& schema = {});
void write_csv(std::ostream& out, const std::vector<TelemetryRecord>& records,
               const SchemaConfig& schema = {});
void write_jsonl(std::ostream& out, const std::vector<TelemetryRecord>& records);

// Format chosen from the extension: .csv, otherwise JSON lines.
std::vector<TelemetryRecord> read_file(const std::filesystem::path& path, const SchemaConfig& schema = {});
void write_file(const std::filesystem::path& path, const std::vector<TelemetryRecord>& records,
                const SchemaConfig& schema = {});

struct LabeledStream {
  std::vector<TelemetryRecord> records;
  std::vector<bool> ground_truth;
};

// Ground truth recovered from record labels (missing label = normal).
LabeledStream labeled_from_records(std::vector<TelemetryRecord> records);

enum class FaultKind { kSpike, kDrift, kDropout, kLogBurst };

std::string to_string(FaultKind kind);
FaultKind fault_kind_from_string(const std::string& name);

struct ChannelProfile {
  std::string name;
  double base = 0.5;
  double diurnal_amplitude = 0.1;
  double noise_std = 0.02;
};

struct ProviderProfile {
  std::string name;
  std::string service = "svc";
  std::vector<ChannelProfile> channels;
  double info_log_rate = 0.8;   // probability of one INFO line per step
  double warn_log_rate = 0.03;  // probability of one benign WARN line per step
};

// magnitude is in units of the target channel's noise std for spike and
// drift (drift ramps linearly to it), a fraction of the value removed for
// dropout, and the number of error lines per step for log-burst.
struct FaultSpec {
  std::size_t start_step = 0;
  std::size_t length = 1;
  FaultKind kind = FaultKind::kSpike;
  double magnitude = 5.0;
  std::string provider;
  std::size_t channel = 0;
};

struct SyntheticScenario {
  std::uint64_t seed = 0;
  std::size_t duration_steps = 0;
  std::int64_t start_timestamp_ms = 1'700'000'000'000;
  std::int64_t step_ms = 60'000;
  std::size_t diurnal_period_steps = 1440;
  std::vector<ProviderProfile> providers;
  std::vector<FaultSpec> faults;

  std::size_t channel_count() const;
  // Column index of (provider, channel) in the concatenated metric vector.
  std::size_t channel_index(const std::string& provider, std::size_t channel) const;
};

void validate(const SyntheticScenario& scenario);

// Deterministic for a fixed scenario (seed included). Metric noise, routine
// logs and fault log bursts draw from independent streams, so adding or
// removing a fault never perturbs the rest of the stream.
LabeledStream generate(const SyntheticScenario& scenario);

// Noise-free baseline level (base + diurnal term) of a metric column.
double baseline_level(const SyntheticScenario& scenario, std::size_t column, std::size_t step);

SyntheticScenario load_scenario(const std::filesystem::path& path);
SyntheticScenario scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const SyntheticScenario& scenario);

// [start, end) runs of true flags.
struct Interval {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const Interval&, const Interval&) = default;
};
std::vector<Interval> intervals_from_flags(const std::vector<bool>& flags);

}  // namespace mcad::ingest
