// SPDX-License-Identifier: Apache-2.0

#include "mcad/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "mcad/error.hpp"

namespace mcad {

ClassMetrics class_metrics(std::size_t tp, std::size_t fp, std::size_t fn) {
  ClassMetrics m;
  const double t = static_cast<double>(tp);
  if (tp + fp > 0) m.precision = t / static_cast<double>(tp + fp);
  if (tp + fn > 0) m.recall = t / static_cast<double>(tp + fn);
  if (m.precision + m.recall > 0.0) m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

MetricsReport metrics(const std::vector<bool>& predicted, const std::vector<bool>& truth) {
  if (predicted.size() != truth.size())
    throw Error(ErrorCode::LengthMismatch, "predictions (" + std::to_string(predicted.size()) +
                                               ") and ground truth (" + std::to_string(truth.size()) + ") differ");
  MetricsReport r;
  auto& c = r.confusion;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] && truth[i]) ++c.tp;
    else if (predicted[i]) ++c.fp;
    else if (truth[i]) ++c.fn;
    else ++c.tn;
  }
  r.anomalous = class_metrics(c.tp, c.fp, c.fn);
  r.normal = class_metrics(c.tn, c.fn, c.fp);
  return r;
}

LatencyReport detection_latency(std::span<const std::size_t> alert_steps, std::span<const ingest::Interval> faults,
                                std::size_t grace) {
  LatencyReport r;
  std::vector<std::size_t> alerts(alert_steps.begin(), alert_steps.end());
  std::sort(alerts.begin(), alerts.end());
  std::vector<double> latencies;
  for (const auto& f : faults) {
    FaultLatency fl{f, std::nullopt};
    auto it = std::lower_bound(alerts.begin(), alerts.end(), f.start);
    if (it != alerts.end() && *it <= f.start + grace) {
      fl.latency = *it - f.start;
      latencies.push_back(static_cast<double>(*fl.latency));
      ++r.detected;
    } else {
      ++r.missed;
    }
    r.faults.push_back(fl);
  }
  for (std::size_t a : alerts) {
    const bool inside = std::any_of(faults.begin(), faults.end(),
                                    [&](const ingest::Interval& f) { return a >= f.start && a <= f.start + grace; });
    if (!inside) ++r.false_alarms;
  }
  if (!latencies.empty()) {
    double sum = 0.0;
    for (double v : latencies) sum += v;
    r.mean = sum / static_cast<double>(latencies.size());
    std::sort(latencies.begin(), latencies.end());
    const std::size_t n = latencies.size();
    r.median = n % 2 ? latencies[n / 2] : 0.5 * (latencies[n / 2 - 1] + latencies[n / 2]);
  }
  return r;
}

std::vector<bool> threshold_baseline(std::span<const TelemetryRecord> records, const ChannelStats& stats, double k) {
  std::vector<bool> flags(records.size(), false);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& m = records[i].metrics;
    if (m.size() != stats.channels())
      throw Error(ErrorCode::ChannelMismatch, "record " + std::to_string(i) + " has " + std::to_string(m.size()) +
                                                  " channels, expected " + std::to_string(stats.channels()));
    for (std::size_t c = 0; c < m.size(); ++c) {
      if (std::abs(m[c] - stats.mean[c]) >= k * stats.stddev[c]) {
        flags[i] = true;
        break;
      }
    }
  }
  return flags;
}

std::vector<bool> window_flags_from_steps(const std::vector<bool>& steps, std::size_t window_len, std::size_t stride) {
  std::vector<bool> out;
  const std::size_t n = window_count(steps.size(), window_len, stride);
  out.reserve(n);
  for (std::size_t w = 0; w < n; ++w) {
    const std::size_t start = w * stride;
    out.push_back(std::any_of(steps.begin() + static_cast<std::ptrdiff_t>(start),
                              steps.begin() + static_cast<std::ptrdiff_t>(start + window_len),
                              [](bool b) { return b; }));
  }
  return out;
}

nlohmann::ordered_json to_json(const MetricsReport& m) {
  auto cls = [](const ClassMetrics& c) {
    return nlohmann::ordered_json{{"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}};
  };
  nlohmann::ordered_json j;
  j["confusion"] = {{"tp", m.confusion.tp}, {"fp", m.confusion.fp}, {"fn", m.confusion.fn}, {"tn", m.confusion.tn}};
  j["anomalous"] = cls(m.anomalous);
  j["normal"] = cls(m.normal);
  return j;
}

nlohmann::ordered_json to_json(const LatencyReport& l) {
  nlohmann::ordered_json j;
  j["detected"] = l.detected;
  j["missed"] = l.missed;
  j["false_alarms"] = l.false_alarms;
  j["mean_steps"] = l.mean ? nlohmann::ordered_json(*l.mean) : nlohmann::ordered_json(nullptr);
  j["median_steps"] = l.median ? nlohmann::ordered_json(*l.median) : nlohmann::ordered_json(nullptr);
  auto list = nlohmann::ordered_json::array();
  for (const auto& f : l.faults) {
    list.push_back({{"start", f.fault.start},
                    {"end", f.fault.end},
                    {"latency", f.latency ? nlohmann::ordered_json(*f.latency) : nlohmann::ordered_json("missed")}});
  }
  j["faults"] = std::move(list);
  return j;
}

}  // namespace mcad
