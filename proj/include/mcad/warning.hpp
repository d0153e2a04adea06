// SPDX-License-Identifier: Apache-2.0
#pragma once

// Bayesian early warning: class-conditional score histograms turn an SVM
// score into p(anomalous | score); a per-stream reducer applies the
// confidence threshold and persistence rule.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace mcad {

struct LikelihoodModel {
  std::vector<double> edges;         // bins + 1, increasing
  std::vector<double> p_anomalous;   // p(bin | anomalous), sums to 1
  std::vector<double> p_normal;      // p(bin | normal), sums to 1
  double prior_anomalous = 0.5;
  double prior_normal = 0.5;
  double pseudo_count = 1.0;

  std::size_t bins() const { return p_normal.size(); }
  // Scores outside the calibrated range fall into the edge bins.
  std::size_t bin_index(double score) const;
  nlohmann::ordered_json to_json() const;
  static LikelihoodModel from_json(const nlohmann::json& j);
};

// Labels use the detector convention (+1 normal, -1 anomalous). The bins
// split [min score, max score] evenly.
LikelihoodModel calibrate(std::span<const double> scores, std::span<const int> labels, std::size_t bins = 20,
                          double pseudo_count = 1.0);

double posterior(double score, const LikelihoodModel& model);
double posterior_normal(double score, const LikelihoodModel& model);

struct AlertDecision {
  std::size_t window_id = 0;
  std::int64_t timestamp = 0;
  double score = 0.0;
  double posterior = 0.0;
  bool alert = false;
  std::size_t consecutive_count = 0;
};

// Stateful per-stream reducer: counts consecutive windows with
// posterior >= threshold and alerts once the count reaches `persistence`.
class AlertReducer {
 public:
  AlertReducer(double threshold, std::size_t persistence);
  AlertDecision push(std::size_t window_id, std::int64_t timestamp, double score, double posterior);
  void reset() { consecutive_ = 0; }

 private:
  double threshold_;
  std::size_t persistence_;
  std::size_t consecutive_ = 0;
};

struct PosteriorPoint {
  std::size_t window_id = 0;
  double posterior = 0.0;
  std::int64_t timestamp = 0;
  double score = 0.0;
};
std::vector<AlertDecision> decide(std::span<const PosteriorPoint> stream, double threshold, std::size_t persistence);

struct WarningConfig {
  std::size_t bins = 20;
  double pseudo_count = 1.0;
  double threshold = 0.9;
  std::size_t persistence = 1;
  bool verbose = false;

  void validate() const;
};

// One JSON object: {"ts", "window_id", "score", "posterior", "alert"}.
std::string serialize_alert(const AlertDecision& decision);
AlertDecision parse_alert_line(const std::string& line);

// Writes alert lines to standard output or appends them to a file. Non-alert
// decisions are written only in verbose mode.
class AlertSink {
 public:
  explicit AlertSink(bool verbose = false);
  AlertSink(const std::filesystem::path& path, bool verbose = false);
  // Returns whether a line was written.
  bool emit(const AlertDecision& decision);
  std::size_t lines_written() const { return lines_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
  bool verbose_;
  std::size_t lines_ = 0;
};

}  // namespace mcad
