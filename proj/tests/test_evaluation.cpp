// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "mcad/error.hpp"
#include "mcad/evaluation.hpp"
#include "mcad/rng.hpp"

using namespace mcad;

namespace {

std::vector<bool> flags_from(std::initializer_list<int> v) {
  std::vector<bool> out;
  for (int x : v) out.push_back(x != 0);
  return out;
}

TelemetryRecord record_with(std::vector<double> metrics) {
  TelemetryRecord r;
  r.metrics = std::move(metrics);
  return r;
}

}  // namespace

TEST_CASE("metric examples") {
  const auto m = class_metrics(8, 2, 2);
  CHECK(m.precision == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(m.recall == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(m.f1 == doctest::Approx(0.8).epsilon(1e-15));

  const std::vector<bool> none(10, false);
  const auto r = metrics(none, none);
  CHECK(r.anomalous.precision == 0.0);
  CHECK(r.anomalous.recall == 0.0);
  CHECK(r.anomalous.f1 == 0.0);
  CHECK(r.confusion.tn == 10);
  CHECK(r.normal.f1 == 1.0);

  CHECK_THROWS_AS(metrics(none, std::vector<bool>(9, false)), Error);
}

TEST_CASE("metrics match a counting loop oracle") {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(50);
    std::vector<bool> pred(n), truth(n);
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] = rng.uniform() < 0.4;
      truth[i] = rng.uniform() < 0.3;
    }
    double tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (pred[i] && truth[i]) tp += 1;
      else if (pred[i]) fp += 1;
      else if (truth[i]) fn += 1;
      else tn += 1;
    }
    const double p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double rc = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    const double f1 = p + rc > 0 ? 2 * p * rc / (p + rc) : 0.0;
    const auto r = metrics(pred, truth);
    CHECK(r.confusion.tp == tp);
    CHECK(r.confusion.fp == fp);
    CHECK(r.confusion.fn == fn);
    CHECK(r.confusion.tn == tn);
    CHECK(r.confusion.tp + r.confusion.fn == std::count(truth.begin(), truth.end(), true));
    CHECK(std::abs(r.anomalous.precision - p) <= 1e-12);
    CHECK(std::abs(r.anomalous.recall - rc) <= 1e-12);
    CHECK(std::abs(r.anomalous.f1 - f1) <= 1e-12);
  }
}

TEST_CASE("F1 agrees with the emitted confusion counts") {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<bool> pred(40), truth(40);
    for (std::size_t i = 0; i < 40; ++i) {
      pred[i] = rng.uniform() < 0.5;
      truth[i] = rng.uniform() < 0.5;
    }
    const auto r = metrics(pred, truth);
    const auto j = to_json(r);
    const auto c = j["confusion"];
    const auto again = class_metrics(c["tp"].get<std::size_t>(), c["fp"].get<std::size_t>(), c["fn"].get<std::size_t>());
    CHECK(again.f1 == j["anomalous"]["f1"].get<double>());
  }
}

TEST_CASE("latency examples") {
  const std::vector<ingest::Interval> faults{{100, 105}};
  const std::vector<std::size_t> at103{103, 110};
  auto r = detection_latency(at103, faults, 50);
  REQUIRE(r.faults[0].latency.has_value());
  CHECK(*r.faults[0].latency == 3);
  CHECK(r.detected == 1);
  CHECK(r.false_alarms == 0);
  CHECK(*r.mean == 3.0);

  const std::vector<std::size_t> late{151, 20};
  r = detection_latency(late, faults, 50);
  CHECK_FALSE(r.faults[0].latency.has_value());
  CHECK(r.missed == 1);
  CHECK(r.false_alarms == 2);
  CHECK_FALSE(r.mean.has_value());
  CHECK(to_json(r)["mean_steps"].is_null());

  const std::vector<std::size_t> edge{150};
  CHECK(*detection_latency(edge, faults, 50).faults[0].latency == 50);
}

TEST_CASE("latency matches an exhaustive scan oracle") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t grace = 1 + rng.below(30);
    std::vector<ingest::Interval> faults;
    std::size_t pos = rng.below(20);
    const std::size_t nf = rng.below(5);
    for (std::size_t i = 0; i < nf; ++i) {
      const std::size_t len = 1 + rng.below(8);
      faults.push_back({pos, pos + len});
      pos += len + 1 + rng.below(60);
    }
    std::vector<std::size_t> alerts;
    const std::size_t na = rng.below(15);
    for (std::size_t i = 0; i < na; ++i) alerts.push_back(rng.below(pos + 40));

    std::vector<double> lat;
    std::size_t missed = 0, fa = 0;
    for (const auto& f : faults) {
      std::optional<std::size_t> best;
      for (std::size_t a : alerts)
        if (a >= f.start && a <= f.start + grace && (!best || a < *best)) best = a;
      if (best) lat.push_back(static_cast<double>(*best - f.start));
      else ++missed;
    }
    for (std::size_t a : alerts) {
      bool inside = false;
      for (const auto& f : faults) inside |= a >= f.start && a <= f.start + grace;
      fa += !inside;
    }
    const auto r = detection_latency(alerts, faults, grace);
    CHECK(r.missed == missed);
    CHECK(r.detected == lat.size());
    CHECK(r.false_alarms == fa);
    if (!lat.empty()) {
      double s = 0;
      for (double v : lat) s += v;
      CHECK(std::abs(*r.mean - s / static_cast<double>(lat.size())) <= 1e-12);
      std::sort(lat.begin(), lat.end());
      const std::size_t n = lat.size();
      const double med = n % 2 ? lat[n / 2] : 0.5 * (lat[n / 2 - 1] + lat[n / 2]);
      CHECK(*r.median == med);
    }
    for (const auto& fl : r.faults)
      if (fl.latency) CHECK(*fl.latency <= grace);
  }
}

TEST_CASE("threshold baseline examples") {
  ChannelStats stats{{1.0, 2.0}, {0.5, 1.0}};
  std::vector<TelemetryRecord> flat(20, record_with({1.0, 2.0}));
  for (bool f : threshold_baseline(flat, stats, 3.0)) CHECK_FALSE(f);

  flat[7].metrics[1] = 2.0 + 5.0;
  const auto flags = threshold_baseline(flat, stats, 3.0);
  for (std::size_t i = 0; i < flags.size(); ++i) CHECK(flags[i] == (i == 7));

  std::vector<TelemetryRecord> wrong{record_with({1.0})};
  CHECK_THROWS_AS(threshold_baseline(wrong, stats, 3.0), Error);
}

TEST_CASE("threshold baseline matches a per-step loop oracle") {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + rng.below(5);
    ChannelStats stats;
    for (std::size_t c = 0; c < m; ++c) {
      stats.mean.push_back(rng.uniform(-1, 1));
      stats.stddev.push_back(rng.uniform(0.1, 2.0));
    }
    std::vector<TelemetryRecord> recs;
    for (int i = 0; i < 30; ++i) {
      std::vector<double> v(m);
      for (std::size_t c = 0; c < m; ++c) v[c] = stats.mean[c] + rng.normal() * 2.0 * stats.stddev[c];
      recs.push_back(record_with(v));
    }
    const double k = rng.uniform(1.0, 4.0);
    const auto flags = threshold_baseline(recs, stats, k);
    for (std::size_t i = 0; i < recs.size(); ++i) {
      bool any = false;
      for (std::size_t c = 0; c < m; ++c) any |= std::abs(recs[i].metrics[c] - stats.mean[c]) >= k * stats.stddev[c];
      CHECK(flags[i] == any);
    }
  }
}

TEST_CASE("window flags from step flags") {
  const auto steps = flags_from({0, 0, 1, 0, 0, 0, 0, 0});
  CHECK(window_flags_from_steps(steps, 3, 1) == flags_from({1, 1, 1, 0, 0, 0}));
  CHECK(window_flags_from_steps(steps, 3, 2) == flags_from({1, 1, 0}));
  CHECK(window_flags_from_steps(steps, 10, 1).empty());
}
