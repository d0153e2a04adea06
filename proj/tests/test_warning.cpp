// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mcad/error.hpp"
#include "mcad/rng.hpp"
#include "mcad/warning.hpp"

using namespace mcad;

namespace {

// Independent Bayes rule: linear bin scan with edge clamping.
double oracle_posterior(double s, const LikelihoodModel& m) {
  std::size_t bin = 0;
  for (std::size_t i = 0; i + 1 < m.edges.size(); ++i)
    if (s >= m.edges[i]) bin = i;
  const double a = m.p_anomalous[bin] * m.prior_anomalous;
  const double n = m.p_normal[bin] * m.prior_normal;
  return a / (a + n);
}

LikelihoodModel random_model(Rng& rng) {
  std::vector<double> scores;
  std::vector<int> labels;
  const std::size_t n = 20 + rng.below(200);
  for (std::size_t i = 0; i < n; ++i) {
    const bool anomalous = i < 2 || rng.uniform() < 0.3;
    labels.push_back(anomalous ? -1 : 1);
    scores.push_back(anomalous ? rng.normal(-1.0, 1.0) : rng.normal(1.5, 1.0));
  }
  labels[2] = 1;
  return calibrate(scores, labels, 2 + rng.below(30), rng.uniform(0.1, 2.0));
}

std::filesystem::path temp_path(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("mcad_test_" + name);
  std::filesystem::remove(p);
  return p;
}

}  // namespace

TEST_CASE("calibration priors, smoothing and normalization") {
  std::vector<double> scores;
  std::vector<int> labels;
  for (int i = 0; i < 10; ++i) {
    scores.push_back(1.0 + 0.1 * i);
    labels.push_back(1);
    scores.push_back(-2.0 - 0.1 * i);
    labels.push_back(-1);
  }
  const auto m = calibrate(scores, labels, 20, 1.0);
  CHECK(m.prior_anomalous == 0.5);
  CHECK(m.prior_normal == 0.5);
  CHECK(m.bins() == 20);
  CHECK(m.edges.size() == 21);
  CHECK(m.edges.front() == scores[19]);
  CHECK(m.edges.back() == scores[18]);
  double sa = 0, sn = 0;
  for (std::size_t b = 0; b < m.bins(); ++b) {
    CHECK(m.p_anomalous[b] > 0.0);
    CHECK(m.p_normal[b] > 0.0);
    sa += m.p_anomalous[b];
    sn += m.p_normal[b];
  }
  CHECK(std::abs(sa - 1.0) <= 1e-12);
  CHECK(std::abs(sn - 1.0) <= 1e-12);
  // A middle bin holds no samples but still has probability mass.
  CHECK(m.p_normal[m.bin_index(-0.5)] == doctest::Approx(1.0 / 30.0));
}

TEST_CASE("calibration errors") {
  const std::vector<double> s{1, 2, 3};
  auto expect = [](ErrorCode code, auto&& fn) {
    try {
      fn();
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.code() == code);
    }
  };
  expect(ErrorCode::SingleClassData, [&] { calibrate(s, std::vector<int>{1, 1, 1}); });
  expect(ErrorCode::InvalidArgument, [&] { calibrate(s, std::vector<int>{1, -1, 1}, 1); });
  expect(ErrorCode::InvalidLabel, [&] { calibrate(s, std::vector<int>{1, -1, 0}); });
  expect(ErrorCode::LengthMismatch, [&] { calibrate(s, std::vector<int>{1, -1}); });
}

TEST_CASE("degenerate score range is widened") {
  const std::vector<double> s{0.3, 0.3, 0.3, 0.3};
  const auto m = calibrate(s, std::vector<int>{1, -1, 1, -1}, 4);
  CHECK(m.edges.front() == doctest::Approx(-0.2));
  CHECK(m.edges.back() == doctest::Approx(0.8));
}

TEST_CASE("posterior examples") {
  LikelihoodModel m;
  m.edges = {0, 1, 2};
  m.p_anomalous = {0.5, 0.5};
  m.p_normal = {0.5, 0.5};
  CHECK(posterior(0.5, m) == 0.5);
  m.prior_anomalous = 0.01;
  m.prior_normal = 0.99;
  CHECK(posterior(1.5, m) == doctest::Approx(0.01).epsilon(1e-14));
  m.p_anomalous = {0.9, 0.1};
  m.p_normal = {0.1, 0.9};
  // Clamping: far outside the range falls into the edge bins.
  CHECK(posterior(-100, m) == posterior(0.1, m));
  CHECK(posterior(100, m) == posterior(1.9, m));
}

TEST_CASE("posterior matches the scalar Bayes oracle") {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = random_model(rng);
    for (int k = 0; k < 20; ++k) {
      const double s = rng.uniform(m.edges.front() - 1.0, m.edges.back() + 1.0);
      const double p = posterior(s, m);
      CHECK(std::abs(p - oracle_posterior(s, m)) <= 1e-12);
      CHECK(std::abs(p + posterior_normal(s, m) - 1.0) <= 1e-12);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
  }
}

TEST_CASE("posterior is monotone in the likelihood ratio") {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = random_model(rng);
    for (std::size_t i = 0; i < m.bins(); ++i)
      for (std::size_t j = 0; j < m.bins(); ++j) {
        const double ri = m.p_anomalous[i] / m.p_normal[i], rj = m.p_anomalous[j] / m.p_normal[j];
        if (ri <= rj * (1.0 + 1e-9)) continue;  // equal ratios up to rounding
        const double si = 0.5 * (m.edges[i] + m.edges[i + 1]), sj = 0.5 * (m.edges[j] + m.edges[j + 1]);
        CHECK(posterior(si, m) > posterior(sj, m));
      }
  }
}

TEST_CASE("likelihood model json round trip") {
  Rng rng(3);
  const auto m = random_model(rng);
  const auto back = LikelihoodModel::from_json(nlohmann::json::parse(m.to_json().dump()));
  CHECK(back.edges == m.edges);
  CHECK(back.p_anomalous == m.p_anomalous);
  CHECK(back.p_normal == m.p_normal);
  CHECK(back.prior_anomalous == m.prior_anomalous);
  nlohmann::json bad = m.to_json();
  bad["p_normal"].erase(0);
  CHECK_THROWS_AS(LikelihoodModel::from_json(bad), Error);
}

TEST_CASE("decide examples") {
  auto run = [](std::vector<double> post, double thr, std::size_t persistence) {
    std::vector<PosteriorPoint> pts;
    for (std::size_t i = 0; i < post.size(); ++i) pts.push_back({i, post[i], static_cast<std::int64_t>(i), 0.0});
    std::vector<bool> out;
    for (const auto& d : decide(pts, thr, persistence)) out.push_back(d.alert);
    return out;
  };
  CHECK(run({0.2, 0.95, 0.96}, 0.9, 2) == std::vector<bool>{false, false, true});
  CHECK(run({0.95, 0.2, 0.95}, 0.9, 2) == std::vector<bool>{false, false, false});
  CHECK(run({0.95, 0.2, 0.9, 0.89}, 0.9, 1) == std::vector<bool>{true, false, true, false});
  CHECK(run({0.95, 0.95, 0.95, 0.95, 0.1}, 0.9, 2) == std::vector<bool>{false, true, true, true, false});
  CHECK_THROWS_AS(AlertReducer(0.0, 1), Error);
  CHECK_THROWS_AS(AlertReducer(0.5, 0), Error);
}

TEST_CASE("property: alerts need persistence consecutive super-threshold windows") {
  Rng rng(4);
  for (int stream = 0; stream < 1000; ++stream) {
    const std::size_t persistence = 1 + rng.below(4);
    const double threshold = rng.uniform(0.5, 0.95);
    std::vector<PosteriorPoint> pts(1 + rng.below(60));
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {i, rng.uniform(), 0, 0.0};
    const auto out = decide(pts, threshold, persistence);
    std::size_t run = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      run = pts[i].posterior >= threshold ? run + 1 : 0;
      CHECK(out[i].consecutive_count == run);
      CHECK(out[i].alert == (run >= persistence));
    }
  }
}

TEST_CASE("alert lines round trip and respect verbosity") {
  AlertDecision d{17, 1700000000123, -1.25, 0.975, true, 3};
  const std::string line = serialize_alert(d);
  CHECK(line == R"({"ts":1700000000123,"window_id":17,"score":-1.25,"posterior":0.975,"alert":true})");
  const auto back = parse_alert_line(line);
  CHECK(back.timestamp == d.timestamp);
  CHECK(back.window_id == d.window_id);
  CHECK(back.score == d.score);
  CHECK(back.posterior == d.posterior);
  CHECK(back.alert == d.alert);
  CHECK_THROWS_AS(parse_alert_line("{not json"), Error);

  const auto path = temp_path("alerts.jsonl");
  {
    AlertSink quiet(path, false);
    AlertDecision off = d;
    off.alert = false;
    CHECK_FALSE(quiet.emit(off));
    CHECK(quiet.emit(d));
    CHECK(quiet.lines_written() == 1);
  }
  {
    AlertSink loud(path, true);
    for (std::size_t i = 0; i < 1000; ++i) {
      AlertDecision x{i, static_cast<std::int64_t>(i), 0.1 * i, 0.0, i % 7 == 0, 0};
      CHECK(loud.emit(x));
    }
  }
  std::ifstream in(path);
  std::string l;
  std::vector<std::size_t> ids;
  while (std::getline(in, l)) ids.push_back(parse_alert_line(l).window_id);
  REQUIRE(ids.size() == 1001);
  CHECK(ids[0] == 17);
  for (std::size_t i = 0; i < 1000; ++i) CHECK(ids[i + 1] == i);
  std::filesystem::remove(path);
}

TEST_CASE("unavailable sinks raise SinkUnavailable") {
  try {
    AlertSink sink(std::filesystem::path("/nonexistent-dir/x/alerts.jsonl"));
    FAIL("expected SinkUnavailable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SinkUnavailable);
  }
  if (std::filesystem::exists("/dev/full")) {
    AlertSink full(std::filesystem::path("/dev/full"));
    AlertDecision d;
    d.alert = true;
    try {
      full.emit(d);
      FAIL("expected SinkUnavailable");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SinkUnavailable);
    }
  }
}

TEST_CASE("warning config validation") {
  WarningConfig c;
  CHECK(c.bins == 20);
  CHECK(c.threshold == 0.9);
  CHECK(c.persistence == 1);
  CHECK_NOTHROW(c.validate());
  c.threshold = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
}
