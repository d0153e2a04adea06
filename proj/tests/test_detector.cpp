// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "mcad/detector.hpp"
#include "mcad/error.hpp"
#include "test_util.hpp"

using namespace mcad;
using mcad::testing::check_param;
using mcad::testing::random_tensor;
using mcad::testing::random_vector;

namespace {

using Points = std::vector<std::vector<double>>;

double loop_objective(const Points& z, const std::vector<int>& y, const SvmParams& p) {
  double reg = 0;
  for (double w : p.w) reg += w * w;
  double sum = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    double f = p.b;
    for (std::size_t k = 0; k < p.w.size(); ++k) f += p.w[k] * z[i][k];
    sum += std::max(0.0, 1.0 - y[i] * f);
  }
  return 0.5 * reg + p.c * sum;
}

// Four points in the plane split by a random line through a random offset,
// each at least 0.5 from it.
void separable_toy(Rng& rng, Points& z, std::vector<int>& y) {
  const double angle = rng.uniform(0.0, 6.283185307179586);
  const double nx = std::cos(angle), ny = std::sin(angle), off = rng.uniform(-0.5, 0.5);
  z.clear();
  y.clear();
  while (z.size() < 4) {
    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
    const double d = nx * a + ny * b + off;
    if (std::abs(d) < 0.5) continue;
    const int label = d > 0 ? kNormalLabel : kAnomalousLabel;
    if (z.size() == 3 && std::count(y.begin(), y.end(), label) == 3) continue;
    z.push_back({a, b});
    y.push_back(label);
  }
}

double accuracy(const Points& z, const std::vector<int>& y, const SvmParams& p) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < z.size(); ++i) ok += (decision(z[i], p) > 0) == (y[i] > 0);
  return static_cast<double>(ok) / static_cast<double>(z.size());
}

ExtractorConfig mini_config() {
  ExtractorConfig c;
  c.channels = 2;
  c.window = 4;
  c.kernel_sizes = {3, 5};
  c.branch_channels = 2;
  c.cnn_dim = 3;
  c.lstm_hidden = 3;
  c.lstm_layers = 2;
  c.context_dim = 2;
  c.attn_dk = 2;
  c.attn_dv = 3;
  return c;
}

}  // namespace

TEST_CASE("decision and hinge examples") {
  SvmParams p = SvmParams::zeros(2);
  p.w = {1, 2};
  p.b = 0.5;
  const std::vector<double> z{3, -1};
  CHECK(decision(z, p) == 1.5);
  CHECK(hinge(+1, 0.0) == 1.0);
  CHECK(hinge(-1, 0.5) == 1.5);
  CHECK(hinge(+1, 2.0) == 0.0);
  CHECK(hinge(-1, -1.0) == 0.0);
  CHECK_THROWS_AS(decision(std::vector<double>{1}, p), Error);
}

TEST_CASE("objective examples") {
  SvmParams p = SvmParams::zeros(2, 3.0);
  const Points one{{1, 1}};
  CHECK(objective(one, std::vector<int>{+1}, p) == 3.0);
  p.w = {2, 0};
  const Points pair{{1, 0}, {-1, 0}};
  CHECK(objective(pair, std::vector<int>{+1, -1}, p) == 2.0);
  CHECK_THROWS_AS(objective(Points{}, std::vector<int>{}, p), Error);
}

TEST_CASE("objective matches a scalar loop oracle") {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(8), d = 1 + rng.below(6);
    Points z;
    std::vector<int> y;
    for (std::size_t i = 0; i < n; ++i) {
      z.push_back(random_vector(rng, d, 2.0));
      y.push_back(rng.uniform(0, 1) < 0.5 ? 1 : -1);
    }
    SvmParams p = SvmParams::zeros(d, rng.uniform(0.1, 5.0));
    p.w = random_vector(rng, d);
    p.b = rng.uniform(-1, 1);
    const double got = objective(z, y, p);
    CHECK(got >= 0.0);
    CHECK(std::abs(got - loop_objective(z, y, p)) <= 1e-12);
  }
}

TEST_CASE("sgd step examples") {
  SvmParams p = SvmParams::zeros(1, 1.0, 0.1);
  p.w = {1.0};
  // w = 1, z = 0.5, y = -1, f = 1 -> violated; gradient 1 + 0.5 = 1.5.
  const Points z{{0.5}};
  sgd_step(z, std::vector<int>{-1}, p);
  CHECK(p.w[0] == doctest::Approx(0.85).epsilon(1e-15));

  // Gradient 0.5 from a satisfied batch and w = 0.5 is the pure w - eta*g case.
  SvmParams q = SvmParams::zeros(1, 1.0, 0.1);
  q.w = {0.5};
  const Points far{{10.0}};
  sgd_step(far, std::vector<int>{+1}, q);
  CHECK(q.w[0] == doctest::Approx(0.45).epsilon(1e-15));

  SvmParams r = SvmParams::zeros(3, 1.0, 0.05);
  r.w = {2, -4, 6};
  r.b = 0.3;
  const Points sat{{1, 0, 0}, {0, -1, 0}};
  sgd_step(sat, std::vector<int>{+1, +1}, r);
  CHECK(r.w == std::vector<double>{2 * 0.95, -4 * 0.95, 6 * 0.95});
  CHECK(r.b == 0.3);
}

TEST_CASE("margin exactly one does not count as a violation") {
  SvmParams p = SvmParams::zeros(1, 1.0, 0.1);
  p.w = {1.0};
  const Points z{{1.0}};
  const auto g = svm_gradient(z, std::vector<int>{+1}, p);
  CHECK_FALSE(g.violated[0]);
  CHECK(g.dw[0] == 1.0);
  CHECK(g.db == 0.0);
}

TEST_CASE("property: satisfied batch shrinks w by exactly 1 - eta") {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + rng.below(5);
    SvmParams p = SvmParams::zeros(d, 1.0, rng.uniform(0.001, 0.5));
    p.w = random_vector(rng, d, 3.0);
    p.b = rng.uniform(-1, 1);
    Points z;
    std::vector<int> y;
    for (int i = 0; i < 4; ++i) {
      auto x = random_vector(rng, d);
      const double f = decision(x, p);
      if (std::abs(f) <= 1.0) continue;
      z.push_back(x);
      y.push_back(f > 0 ? 1 : -1);
    }
    if (z.empty()) continue;
    const SvmParams before = p;
    sgd_step(z, y, p);
    for (std::size_t k = 0; k < d; ++k) CHECK(p.w[k] == before.w[k] * (1.0 - before.learning_rate));
    CHECK(p.b == before.b);
  }
}

TEST_CASE("objective gradient matches finite differences") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(100 + seed);
    Points z;
    std::vector<int> y;
    for (int i = 0; i < 5; ++i) {
      z.push_back(random_vector(rng, 4));
      y.push_back(i % 2 ? 1 : -1);
    }
    SvmParams p = SvmParams::zeros(4, 2.0);
    p.w = random_vector(rng, 4);
    p.b = rng.uniform(-0.5, 0.5);
    bool near_kink = false;
    for (std::size_t i = 0; i < z.size(); ++i) near_kink |= std::abs(1 - y[i] * decision(z[i], p)) < 1e-3;
    if (near_kink) continue;
    const auto g = svm_gradient(z, y, p);
    auto loss = [&] { return objective(z, y, p); };
    CHECK(check_param(p.w, loss, g.dw).passed);
    std::span<double> b(&p.b, 1);
    const std::vector<double> db{g.db};
    CHECK(check_param(b, loss, db).passed);
  }
}

TEST_CASE("separable toy sets reach full training accuracy") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(200 + seed);
    Points z;
    std::vector<int> y;
    separable_toy(rng, z, y);
    SvmParams p = SvmParams::zeros(2, 1.0, 0.01);
    const auto report = train_linear(z, y, p, 500, 4, seed);
    CHECK(report.objectives.size() == 500);
    CHECK(accuracy(z, y, p) == 1.0);
  }
}

TEST_CASE("50 steps on a separable toy set decrease the objective") {
  Rng rng(3);
  Points z;
  std::vector<int> y;
  separable_toy(rng, z, y);
  SvmParams p = SvmParams::zeros(2, 1.0, 0.05);
  const double start = objective(z, y, p);
  for (int i = 0; i < 50; ++i) sgd_step(z, y, p);
  CHECK(objective(z, y, p) < start);
  CHECK(accuracy(z, y, p) == 1.0);
}

TEST_CASE("two-cluster data trains to perfect F1") {
  Rng rng(4);
  Points z;
  std::vector<int> y;
  for (int i = 0; i < 60; ++i) {
    const int label = i % 2 ? 1 : -1;
    std::vector<double> x(3);
    for (double& v : x) v = 1.5 * label + rng.normal() * 0.5;
    z.push_back(x);
    y.push_back(label);
  }
  SvmParams p = SvmParams::zeros(3, 1.0, 0.01);
  train_linear(z, y, p, 100, 8, 7);
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const bool pred = decision(z[i], p) < 0, truth = y[i] == kAnomalousLabel;
    tp += pred && truth;
    fp += pred && !truth;
    fn += !pred && truth;
  }
  CHECK(fp == 0);
  CHECK(fn == 0);
  CHECK(tp == 30);
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
  Rng rng(5);
  Points z{{1, 2}, {-1, 0}, {0.5, -2}};
  std::vector<int> y{1, -1, 1};
  SvmParams p = SvmParams::zeros(2, 1.0, 0.0);
  p.w = {0.3, -0.2};
  p.b = 0.1;
  const SvmParams before = p;
  const auto report = train_linear(z, y, p, 10, 2, 1);
  CHECK(p.w == before.w);
  CHECK(p.b == before.b);
  for (double o : report.objectives) CHECK(o == report.objectives.front());
}

TEST_CASE("training is deterministic and rejects single-class data") {
  Points z{{1, 2}, {-1, 0}, {0.5, -2}, {2, 2}};
  std::vector<int> y{1, -1, 1, -1};
  SvmParams a = SvmParams::zeros(2), b = SvmParams::zeros(2);
  const auto ra = train_linear(z, y, a, 20, 2, 9);
  const auto rb = train_linear(z, y, b, 20, 2, 9);
  CHECK(ra.objectives == rb.objectives);
  CHECK(a.w == b.w);
  SvmParams c = SvmParams::zeros(2);
  try {
    train_linear(z, std::vector<int>{1, 1, 1, 1}, c, 1, 2, 1);
    FAIL("expected SingleClassData");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingleClassData);
  }
}

TEST_CASE("predicted sign is invariant under positive rescaling") {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    SvmParams p = SvmParams::zeros(4);
    p.w = random_vector(rng, 4);
    p.b = rng.uniform(-1, 1);
    SvmParams q = p;
    const double s = rng.uniform(0.01, 100.0);
    for (double& w : q.w) w *= s;
    q.b *= s;
    const auto x = random_vector(rng, 4);
    CHECK((decision(x, p) < 0) == (decision(x, q) < 0));
  }
}

TEST_CASE("random Fourier features approximate the RBF kernel") {
  Rng rng(7);
  const double gamma = 0.25;
  const RffMap map = RffMap::create(5, 2048, gamma, rng);
  CHECK(map.output_dim() == 2048);
  double err = 0;
  for (int i = 0; i < 50; ++i) {
    const auto x = random_vector(rng, 5), y = random_vector(rng, 5);
    const auto fx = rff_transform(x, map), fy = rff_transform(y, map);
    double k = 0, d2 = 0;
    for (std::size_t j = 0; j < fx.size(); ++j) k += fx[j] * fy[j];
    for (std::size_t j = 0; j < 5; ++j) d2 += (x[j] - y[j]) * (x[j] - y[j]);
    err += std::abs(k - std::exp(-gamma * d2));
    double self = 0;
    for (double v : fx) self += v * v;
    CHECK(std::abs(self - 1.0) < 0.1);
  }
  CHECK(err / 50 < 0.05);
  const auto x = random_vector(rng, 5);
  CHECK(rff_transform(x, map) == rff_transform(x, map));
  CHECK_THROWS_AS(rff_transform(random_vector(rng, 4), map), Error);
}

TEST_CASE("rff backward matches finite differences") {
  Rng rng(8);
  const RffMap map = RffMap::create(4, 16, 0.5, rng);
  for (int trial = 0; trial < 20; ++trial) {
    auto z = random_vector(rng, 4);
    const auto up = random_vector(rng, 16);
    const auto g = rff_backward(z, map, up);
    auto loss = [&] {
      const auto f = rff_transform(z, map);
      double s = 0;
      for (std::size_t j = 0; j < f.size(); ++j) s += f[j] * up[j];
      return s;
    };
    CHECK(check_param(z, loss, g).passed);
  }
}

TEST_CASE("end-to-end extractor and svm loss matches finite differences") {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; checked < 20; ++seed) {
    Rng rng(300 + seed);
    const ExtractorConfig cfg = mini_config();
    DetectorConfig dcfg;
    dcfg.c = 1.5;
    HybridModel model = HybridModel::init(cfg, dcfg, seed);
    model.svm.w = random_vector(rng, model.feature_dim(), 2.0);
    model.svm.b = rng.uniform(-0.5, 0.5);
    model.svm.c = dcfg.c;
    std::vector<TrainingSample> samples;
    for (int i = 0; i < 3; ++i)
      samples.push_back({random_tensor(rng, 4, 2), random_vector(rng, 2), i % 2 ? 1 : -1});

    auto loss = [&] {
      Points z;
      std::vector<int> y;
      for (const auto& s : samples) {
        z.push_back(features(s.window, s.context, model));
        y.push_back(s.y);
      }
      return objective(z, y, model.svm);
    };

    ExtractorParams grads = ExtractorParams::zeros(cfg);
    bool near_kink = false;
    for (const auto& s : samples) {
      ExtractorTrace tr;
      const auto pooled = extract(s.window, s.context, model.extractor, cfg, &tr);
      const double f = decision(pooled, model.svm);
      near_kink |= std::abs(1 - s.y * f) < 1e-3;
      if (s.y * f >= 1) continue;
      std::vector<double> up(pooled.size());
      for (std::size_t k = 0; k < up.size(); ++k) up[k] = -model.svm.c * s.y * model.svm.w[k];
      extractor_backward(tr, model.extractor, cfg, up, grads);
    }
    if (near_kink) continue;
    ++checked;
    std::vector<std::span<double>> ps, gs;
    std::vector<std::string> names;
    model.extractor.for_each_param(ExtractorParams::Visitor(
        [&](const std::string& n, const std::vector<std::size_t>&, std::span<double> v) {
          ps.push_back(v);
          names.push_back(n);
        }));
    grads.for_each_param(ExtractorParams::Visitor(
        [&](const std::string&, const std::vector<std::size_t>&, std::span<double> v) { gs.push_back(v); }));
    for (std::size_t i = 0; i < ps.size(); ++i) {
      CAPTURE(names[i]);
      // The loss is O(10), so a larger step keeps rounding noise well below
      // the gradient floor.
      const auto rep = check_param(ps[i], loss, gs[i], 1e-4);
      CAPTURE(rep.max_rel_error);
      CHECK(rep.passed);
    }
  }
}

TEST_CASE("hybrid training: determinism, score composition and toy separation") {
  const ExtractorConfig cfg = mini_config();
  Rng rng(9);
  std::vector<TrainingSample> samples;
  for (int i = 0; i < 24; ++i) {
    const int y = i % 3 == 0 ? kAnomalousLabel : kNormalLabel;
    nk::Tensor2 w = random_tensor(rng, 4, 2, 0.3);
    if (y == kAnomalousLabel)
      for (std::size_t t = 0; t < 4; ++t) w(t, 0) += 3.0;
    samples.push_back({w, std::vector<double>(2, 0.0), y});
  }
  DetectorConfig dcfg;
  dcfg.epochs = 40;
  dcfg.batch_size = 8;
  dcfg.learning_rate = 0.02;
  HybridModel a = HybridModel::init(cfg, dcfg, 11), b = HybridModel::init(cfg, dcfg, 11);
  const auto ra = train(a, samples, dcfg, 11);
  const auto rb = train(b, samples, dcfg, 11);
  CHECK(ra.objectives == rb.objectives);
  CHECK(ra.final_objective == ra.objectives.back());
  for (const auto& s : samples) {
    const double sc = score(s.window, s.context, a);
    CHECK(sc == score(s.window, s.context, b));
    CHECK(sc == decision(attend(fuse(cnn_branch(s.window, a.extractor, cfg.bn_mode), rnn_branch(s.window, a.extractor),
                                      s.context),
                                 a.extractor.attention)
                              .pooled,
                         a.svm));
    CHECK((sc < 0) == (s.y == kAnomalousLabel));
  }

  dcfg.learning_rate = 0.0;
  HybridModel c = HybridModel::init(cfg, dcfg, 12);
  const double before = score(samples[0].window, samples[0].context, c);
  const auto rc = train(c, samples, dcfg, 12);
  for (double o : rc.objectives) CHECK(o == rc.objectives.front());
  CHECK(score(samples[0].window, samples[0].context, c) == before);
}

TEST_CASE("rff hybrid trains without errors") {
  const ExtractorConfig cfg = mini_config();
  Rng rng(10);
  std::vector<TrainingSample> samples;
  for (int i = 0; i < 8; ++i) samples.push_back({random_tensor(rng, 4, 2), random_vector(rng, 2), i % 2 ? 1 : -1});
  DetectorConfig dcfg;
  dcfg.kernel = SvmKernel::kRff;
  dcfg.rff_dim = 32;
  dcfg.epochs = 3;
  HybridModel m = HybridModel::init(cfg, dcfg, 3);
  REQUIRE(m.rff.has_value());
  CHECK(m.feature_dim() == 32);
  CHECK(m.rff->gamma == doctest::Approx(1.0 / 3.0));
  const auto r = train(m, samples, dcfg, 3);
  CHECK(r.objectives.size() == 3);
  CHECK(svm_kernel_from_string("rbf") == SvmKernel::kRff);
  CHECK_THROWS_AS(svm_kernel_from_string("poly"), Error);
}
