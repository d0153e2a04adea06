// SPDX-License-Identifier: Apache-2.0

#include "mcad/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>

#include "mcad/error.hpp"

namespace mcad {

namespace {

std::size_t channel_count(std::span<const TelemetryRecord> records) {
  if (records.empty()) throw Error(ErrorCode::EmptyBatch, "empty telemetry stream");
  const std::size_t m = records.front().metrics.size();
  for (const auto& r : records) validate_record(r, m);
  return m;
}

}  // namespace

PreparedWindows prepare_windows(std::span<const TelemetryRecord> records, const ChannelStats& stats,
                                logsem::ContextEncoder& encoder, std::size_t window_len, std::size_t stride) {
  PreparedWindows out;
  const auto embeddings = encoder.embed_records(records);
  out.context_source = embeddings.source;
  for (auto& w : build_windows(records, window_len, stride)) {
    const WindowTensor n = normalize(w, stats);
    out.windows.push_back(n.values);
    out.contexts.push_back(encoder.window_context(embeddings, w.stride_origin, window_len).values);
    out.starts.push_back(w.stride_origin);
    out.anomalous.push_back(w.label == Label::kAnomalous);
  }
  return out;
}

TrainedModel train_pipeline(std::span<const TelemetryRecord> records, PipelineConfig config, std::uint64_t seed) {
  config.extractor.channels = channel_count(records);
  config.seed = seed;
  config.validate();
  const std::size_t window_len = config.extractor.window;
  const auto n_train = static_cast<std::size_t>(std::floor(config.data.train_fraction * static_cast<double>(records.size())));
  if (n_train < window_len || records.size() - n_train < window_len)
    throw Error(ErrorCode::InvalidArgument, "stream too short for the train/calibration split");
  const auto train_part = records.subspan(0, n_train);
  const auto calib_part = records.subspan(n_train);

  TrainedModel out;
  out.config = config;
  out.stats = fit_stats(train_part);

  logsem::ContextEncoder encoder(config.logsem, logsem::TemplateMiner(config.logsem.miner_threshold));
  const PreparedWindows train_windows = prepare_windows(train_part, out.stats, encoder, window_len, 1);
  std::vector<TrainingSample> samples;
  for (std::size_t i = 0; i < train_windows.windows.size(); ++i) {
    const std::size_t start = train_windows.starts[i];
    const bool anomalous = train_windows.anomalous[i];
    if (start % config.data.train_stride != 0 && !(anomalous && start % config.data.anomalous_stride == 0)) continue;
    samples.push_back({train_windows.windows[i], train_windows.contexts[i], anomalous ? kAnomalousLabel : kNormalLabel});
  }

  out.model = HybridModel::init(config.extractor, config.detector, seed);
  out.report = train(out.model, samples, config.detector, seed);

  const PreparedWindows calib = prepare_windows(calib_part, out.stats, encoder, window_len, config.data.eval_stride);
  std::vector<double> scores;
  std::vector<int> labels;
  for (std::size_t i = 0; i < calib.windows.size(); ++i) {
    scores.push_back(score(calib.windows[i], calib.contexts[i], out.model));
    labels.push_back(calib.anomalous[i] ? kAnomalousLabel : kNormalLabel);
  }
  out.likelihood = calibrate(scores, labels, config.warning.bins, config.warning.pseudo_count);
  out.miner = encoder.miner();
  return out;
}

Detection detect(const TrainedModel& model, std::span<const TelemetryRecord> records) {
  const auto& cfg = model.config;
  if (channel_count(records) != cfg.extractor.channels)
    throw Error(ErrorCode::ChannelMismatch, "stream has " + std::to_string(records.front().metrics.size()) +
                                                " channels, model expects " + std::to_string(cfg.extractor.channels));
  logsem::ContextEncoder encoder(cfg.logsem, model.miner);
  const PreparedWindows prepared =
      prepare_windows(records, model.stats, encoder, cfg.extractor.window, cfg.data.eval_stride);
  Detection d;
  AlertReducer reducer(cfg.warning.threshold, cfg.warning.persistence);
  for (std::size_t i = 0; i < prepared.windows.size(); ++i) {
    const double s = score(prepared.windows[i], prepared.contexts[i], model.model);
    const double p = posterior(s, model.likelihood);
    const std::size_t step = prepared.starts[i] + cfg.extractor.window - 1;
    AlertDecision decision = reducer.push(i, records[step].timestamp, s, p);
    if (decision.alert) d.alert_steps.push_back(step);
    d.window_alerts.push_back(decision.alert);
    d.window_starts.push_back(prepared.starts[i]);
    d.decisions.push_back(decision);
  }
  return d;
}

nlohmann::ordered_json evaluate(const TrainedModel& model, std::span<const TelemetryRecord> records,
                                bool with_baseline) {
  const auto& cfg = model.config;
  const std::size_t window_len = cfg.extractor.window;
  const std::size_t stride = cfg.data.eval_stride;
  std::vector<bool> step_truth;
  for (const auto& r : records) step_truth.push_back(r.label == Label::kAnomalous);
  const std::vector<bool> window_truth = window_flags_from_steps(step_truth, window_len, stride);
  const auto faults = ingest::intervals_from_flags(step_truth);

  const Detection det = detect(model, records);
  nlohmann::ordered_json report;
  report["seed"] = cfg.seed;
  report["config"] = to_json(cfg);
  report["steps"] = records.size();
  report["windows"] = window_truth.size();
  report["anomalous_windows"] = std::count(window_truth.begin(), window_truth.end(), true);
  report["faults"] = faults.size();
  nlohmann::ordered_json hybrid;
  hybrid["metrics"] = to_json(metrics(det.window_alerts, window_truth));
  hybrid["latency"] = to_json(detection_latency(det.alert_steps, faults, cfg.eval.grace_steps));
  hybrid["alerts"] = det.alert_steps.size();
  report["hybrid"] = std::move(hybrid);

  if (with_baseline) {
    const std::vector<bool> step_flags = threshold_baseline(records, model.stats, cfg.eval.baseline_k);
    const std::vector<bool> window_flags = window_flags_from_steps(step_flags, window_len, stride);
    std::vector<std::size_t> alert_steps;
    for (std::size_t w = 0; w < window_flags.size(); ++w)
      if (window_flags[w]) alert_steps.push_back(w * stride + window_len - 1);
    nlohmann::ordered_json baseline;
    baseline["k"] = cfg.eval.baseline_k;
    baseline["metrics"] = to_json(metrics(window_flags, window_truth));
    baseline["latency"] = to_json(detection_latency(alert_steps, faults, cfg.eval.grace_steps));
    baseline["alerts"] = alert_steps.size();
    report["baseline"] = std::move(baseline);
  }
  return report;
}

std::vector<SweepPoint> hidden_size_sweep(std::span<const TelemetryRecord> train_records,
                                          std::span<const TelemetryRecord> records, const PipelineConfig& config,
                                          std::span<const std::size_t> hidden_sizes, bool train, std::size_t repeats,
                                          std::uint64_t seed) {
  std::vector<SweepPoint> out;
  for (std::size_t hidden : hidden_sizes) {
    PipelineConfig cfg = config;
    cfg.extractor.lstm_hidden = hidden;
    SweepPoint point;
    point.lstm_hidden = hidden;
    TrainedModel model;
    if (train) {
      model = train_pipeline(train_records, cfg, seed);
      const auto report = evaluate(model, records, false);
      const auto& lat = report["hybrid"]["latency"]["mean_steps"];
      if (!lat.is_null()) point.mean_latency = lat.get<double>();
      point.f1 = report["hybrid"]["metrics"]["anomalous"]["f1"].get<double>();
    } else {
      model.config = cfg;
      model.config.extractor.channels = channel_count(records);
      model.model = HybridModel::init(model.config.extractor, cfg.detector, seed);
      model.stats = fit_stats(records);
    }
    logsem::ContextEncoder encoder(model.config.logsem, model.miner);
    const PreparedWindows prepared = prepare_windows(records, model.stats, encoder, cfg.extractor.window,
                                                     cfg.data.eval_stride);
    if (prepared.windows.empty()) throw Error(ErrorCode::InvalidArgument, "stream too short for one window");
    double best = std::numeric_limits<double>::infinity();
    double sink = 0.0;
    for (std::size_t r = 0; r < std::max<std::size_t>(1, repeats); ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      for (std::size_t i = 0; i < prepared.windows.size(); ++i)
        sink += score(prepared.windows[i], prepared.contexts[i], model.model);
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
      best = std::min(best, dt.count());
    }
    if (!std::isfinite(sink)) throw Error(ErrorCode::NonFiniteValue, "non-finite score during sweep");
    point.seconds_per_window = best / static_cast<double>(prepared.windows.size());
    out.push_back(point);
  }
  return out;
}

nlohmann::ordered_json to_json(std::span<const SweepPoint> sweep) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& p : sweep) {
    nlohmann::ordered_json j;
    j["lstm_hidden"] = p.lstm_hidden;
    j["seconds_per_window"] = p.seconds_per_window;
    j["mean_latency_steps"] = p.mean_latency ? nlohmann::ordered_json(*p.mean_latency) : nlohmann::ordered_json(nullptr);
    j["f1"] = p.f1 ? nlohmann::ordered_json(*p.f1) : nlohmann::ordered_json(nullptr);
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace mcad
