// SPDX-License-Identifier: Apache-2.0

#include "mcad/telemetry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcad/error.hpp"

namespace mcad {

const TelemetryRecord& validate_record(const TelemetryRecord& record, std::size_t expected_channels) {
  if (record.metrics.size() != expected_channels) {
    throw Error(ErrorCode::ChannelMismatch, "expected " + std::to_string(expected_channels) +
                                                " metrics, got " +
                                                std::to_string(record.metrics.size()));
  }
  for (std::size_t i = 0; i < record.metrics.size(); ++i) {
    if (!std::isfinite(record.metrics[i])) {
      throw Error(ErrorCode::NonFiniteValue, "metric " + std::to_string(i) + " is not finite");
    }
  }
  if (record.timestamp < 0) throw Error(ErrorCode::InvalidTimestamp, "negative timestamp");
  return record;
}

std::size_t window_count(std::size_t records, std::size_t window_len, std::size_t stride) {
  if (window_len == 0 || stride == 0 || records < window_len) return 0;
  return (records - window_len) / stride + 1;
}

std::vector<WindowTensor> build_windows(std::span<const TelemetryRecord> records,
                                        std::size_t window_len, std::size_t stride) {
  if (window_len == 0 || stride == 0)
    throw Error(ErrorCode::InvalidArgument, "window length and stride must be >= 1");
  const std::size_t count = window_count(records.size(), window_len, stride);
  std::vector<WindowTensor> out;
  out.reserve(count);
  if (count == 0) return out;
  const std::size_t channels = records.front().metrics.size();
  for (std::size_t w = 0; w < count; ++w) {
    const std::size_t start = w * stride;
    WindowTensor win;
    win.values = nk::Tensor2(window_len, channels);
    win.start_timestamp = records[start].timestamp;
    win.stride_origin = start;
    bool any_label = false;
    bool anomalous = false;
    for (std::size_t r = 0; r < window_len; ++r) {
      const auto& rec = records[start + r];
      if (rec.metrics.size() != channels)
        throw Error(ErrorCode::ChannelMismatch, "record channel count changed mid-stream");
      std::copy(rec.metrics.begin(), rec.metrics.end(), win.values.row(r).begin());
      if (rec.label) {
        any_label = true;
        anomalous = anomalous || *rec.label == Label::kAnomalous;
      }
    }
    if (any_label) win.label = anomalous ? Label::kAnomalous : Label::kNormal;
    out.push_back(std::move(win));
  }
  return out;
}

namespace {

ChannelStats finish(std::vector<double> mean, std::vector<double> m2, std::size_t n, double floor) {
  ChannelStats s;
  s.mean = std::move(mean);
  s.stddev.resize(s.mean.size());
  for (std::size_t c = 0; c < s.mean.size(); ++c) {
    const double sd = n > 0 ? std::sqrt(m2[c] / static_cast<double>(n)) : 0.0;
    s.stddev[c] = std::max(sd, floor);
  }
  return s;
}

}  // namespace

ChannelStats fit_stats(std::span<const WindowTensor> windows, double std_floor) {
  if (windows.empty()) throw Error(ErrorCode::InvalidArgument, "fit_stats needs training windows");
  const std::size_t m = windows.front().values.cols();
  std::vector<double> mean(m, 0.0), m2(m, 0.0);
  std::size_t n = 0;
  for (const auto& w : windows) {
    nk::require_shape(w.values.cols() == m, "fit_stats channel count");
    for (std::size_t r = 0; r < w.values.rows(); ++r)
      for (std::size_t c = 0; c < m; ++c) mean[c] += w.values(r, c);
    n += w.values.rows();
  }
  for (double& v : mean) v /= static_cast<double>(n);
  for (const auto& w : windows)
    for (std::size_t r = 0; r < w.values.rows(); ++r)
      for (std::size_t c = 0; c < m; ++c) {
        const double d = w.values(r, c) - mean[c];
        m2[c] += d * d;
      }
  return finish(std::move(mean), std::move(m2), n, std_floor);
}

ChannelStats fit_stats(std::span<const TelemetryRecord> records, double std_floor) {
  if (records.empty()) throw Error(ErrorCode::InvalidArgument, "fit_stats needs training records");
  const std::size_t m = records.front().metrics.size();
  std::vector<double> mean(m, 0.0), m2(m, 0.0);
  for (const auto& rec : records) {
    if (rec.metrics.size() != m) throw Error(ErrorCode::ChannelMismatch, "fit_stats channel count");
    for (std::size_t c = 0; c < m; ++c) mean[c] += rec.metrics[c];
  }
  for (double& v : mean) v /= static_cast<double>(records.size());
  for (const auto& rec : records)
    for (std::size_t c = 0; c < m; ++c) {
      const double d = rec.metrics[c] - mean[c];
      m2[c] += d * d;
    }
  return finish(std::move(mean), std::move(m2), records.size(), std_floor);
}

WindowTensor normalize(const WindowTensor& window, const ChannelStats& stats) {
  nk::require_shape(window.values.cols() == stats.channels(), "normalize channel count");
  WindowTensor out = window;
  for (std::size_t r = 0; r < out.values.rows(); ++r)
    for (std::size_t c = 0; c < out.values.cols(); ++c)
      out.values(r, c) = (window.values(r, c) - stats.mean[c]) / stats.stddev[c];
  return out;
}

ChannelStats identity_stats(std::size_t channels) {
  return {std::vector<double>(channels, 0.0), std::vector<double>(channels, 1.0)};
}

}  // namespace mcad
