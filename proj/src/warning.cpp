// SPDX-License-Identifier: Apache-2.0

#include "mcad/warning.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "mcad/error.hpp"

namespace mcad {

std::size_t LikelihoodModel::bin_index(double score) const {
  const std::size_t n = edges.size() - 1;
  if (!(score > edges.front())) return 0;
  if (score >= edges.back()) return n - 1;
  auto it = std::upper_bound(edges.begin(), edges.end(), score);
  const auto idx = static_cast<std::size_t>(it - edges.begin()) - 1;
  return std::min(idx, n - 1);
}

nlohmann::ordered_json LikelihoodModel::to_json() const {
  nlohmann::ordered_json j;
  j["edges"] = edges;
  j["p_anomalous"] = p_anomalous;
  j["p_normal"] = p_normal;
  j["prior_anomalous"] = prior_anomalous;
  j["prior_normal"] = prior_normal;
  j["pseudo_count"] = pseudo_count;
  return j;
}

LikelihoodModel LikelihoodModel::from_json(const nlohmann::json& j) {
  LikelihoodModel m;
  try {
    m.edges = j.at("edges").get<std::vector<double>>();
    m.p_anomalous = j.at("p_anomalous").get<std::vector<double>>();
    m.p_normal = j.at("p_normal").get<std::vector<double>>();
    m.prior_anomalous = j.at("prior_anomalous").get<double>();
    m.prior_normal = j.at("prior_normal").get<double>();
    m.pseudo_count = j.at("pseudo_count").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptCheckpoint, std::string("likelihood model: ") + e.what());
  }
  if (m.p_normal.empty() || m.p_anomalous.size() != m.p_normal.size() || m.edges.size() != m.p_normal.size() + 1)
    throw Error(ErrorCode::CorruptCheckpoint, "likelihood model: inconsistent bin counts");
  return m;
}

LikelihoodModel calibrate(std::span<const double> scores, std::span<const int> labels, std::size_t bins,
                          double pseudo_count) {
  if (scores.size() != labels.size()) throw Error(ErrorCode::LengthMismatch, "scores and labels differ in length");
  if (bins < 2) throw Error(ErrorCode::InvalidArgument, "at least two bins are required");
  if (!(pseudo_count > 0.0)) throw Error(ErrorCode::InvalidArgument, "pseudo-count must be positive");
  std::size_t n_anom = 0, n_norm = 0;
  for (int y : labels) {
    if (y == -1) ++n_anom;
    else if (y == 1) ++n_norm;
    else throw Error(ErrorCode::InvalidLabel, "label must be +1 or -1");
  }
  if (n_anom == 0 || n_norm == 0) throw Error(ErrorCode::SingleClassData, "calibration needs both classes");

  double lo = *std::min_element(scores.begin(), scores.end());
  double hi = *std::max_element(scores.begin(), scores.end());
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw Error(ErrorCode::NonFiniteValue, "non-finite calibration score");
  if (hi - lo <= 0.0) {
    lo -= 0.5;
    hi += 0.5;
  }

  LikelihoodModel m;
  m.pseudo_count = pseudo_count;
  m.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i)
    m.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  m.edges.back() = hi;

  std::vector<double> c_anom(bins, pseudo_count), c_norm(bins, pseudo_count);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const std::size_t b = m.bin_index(scores[i]);
    (labels[i] == -1 ? c_anom : c_norm)[b] += 1.0;
  }
  const double t_anom = static_cast<double>(n_anom) + pseudo_count * static_cast<double>(bins);
  const double t_norm = static_cast<double>(n_norm) + pseudo_count * static_cast<double>(bins);
  m.p_anomalous.resize(bins);
  m.p_normal.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    m.p_anomalous[b] = c_anom[b] / t_anom;
    m.p_normal[b] = c_norm[b] / t_norm;
  }
  const double total = static_cast<double>(n_anom + n_norm);
  m.prior_anomalous = static_cast<double>(n_anom) / total;
  m.prior_normal = static_cast<double>(n_norm) / total;
  return m;
}

double posterior(double score, const LikelihoodModel& model) {
  const std::size_t b = model.bin_index(score);
  const double a = model.p_anomalous[b] * model.prior_anomalous;
  const double n = model.p_normal[b] * model.prior_normal;
  return a / (a + n);
}

double posterior_normal(double score, const LikelihoodModel& model) {
  const std::size_t b = model.bin_index(score);
  const double a = model.p_anomalous[b] * model.prior_anomalous;
  const double n = model.p_normal[b] * model.prior_normal;
  return n / (a + n);
}

AlertReducer::AlertReducer(double threshold, std::size_t persistence)
    : threshold_(threshold), persistence_(persistence) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw Error(ErrorCode::InvalidArgument, "threshold must lie in (0, 1)");
  if (persistence == 0) throw Error(ErrorCode::InvalidArgument, "persistence must be at least 1");
}

AlertDecision AlertReducer::push(std::size_t window_id, std::int64_t timestamp, double score, double posterior) {
  consecutive_ = posterior >= threshold_ ? consecutive_ + 1 : 0;
  AlertDecision d;
  d.window_id = window_id;
  d.timestamp = timestamp;
  d.score = score;
  d.posterior = posterior;
  d.consecutive_count = consecutive_;
  d.alert = consecutive_ >= persistence_;
  return d;
}

std::vector<AlertDecision> decide(std::span<const PosteriorPoint> stream, double threshold, std::size_t persistence) {
  AlertReducer reducer(threshold, persistence);
  std::vector<AlertDecision> out;
  out.reserve(stream.size());
  for (const auto& p : stream) out.push_back(reducer.push(p.window_id, p.timestamp, p.score, p.posterior));
  return out;
}

void WarningConfig::validate() const {
  if (bins < 2) throw Error(ErrorCode::InvalidArgument, "at least two bins are required");
  if (!(pseudo_count > 0.0)) throw Error(ErrorCode::InvalidArgument, "pseudo-count must be positive");
  if (!(threshold > 0.0 && threshold < 1.0)) throw Error(ErrorCode::InvalidArgument, "threshold must lie in (0, 1)");
  if (persistence == 0) throw Error(ErrorCode::InvalidArgument, "persistence must be at least 1");
}

std::string serialize_alert(const AlertDecision& d) {
  nlohmann::ordered_json j;
  j["ts"] = d.timestamp;
  j["window_id"] = d.window_id;
  j["score"] = d.score;
  j["posterior"] = d.posterior;
  j["alert"] = d.alert;
  return j.dump();
}

AlertDecision parse_alert_line(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    AlertDecision d;
    d.timestamp = j.at("ts").get<std::int64_t>();
    d.window_id = j.at("window_id").get<std::size_t>();
    d.score = j.at("score").get<double>();
    d.posterior = j.at("posterior").get<double>();
    d.alert = j.at("alert").get<bool>();
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("alert line: ") + e.what());
  }
}

AlertSink::AlertSink(bool verbose) : out_(&std::cout), verbose_(verbose) {}

AlertSink::AlertSink(const std::filesystem::path& path, bool verbose) : verbose_(verbose) {
  file_.open(path, std::ios::out | std::ios::app);
  if (!file_) throw Error(ErrorCode::SinkUnavailable, "cannot open alert sink " + path.string());
  out_ = &file_;
}

bool AlertSink::emit(const AlertDecision& decision) {
  if (!decision.alert && !verbose_) return false;
  *out_ << serialize_alert(decision) << '\n';
  out_->flush();
  if (!*out_) throw Error(ErrorCode::SinkUnavailable, "alert sink write failed");
  ++lines_;
  return true;
}

}  // namespace mcad
