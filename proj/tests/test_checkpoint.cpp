// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mcad/checkpoint.hpp"
#include "mcad/error.hpp"
#include "mcad/ingest.hpp"
#include "mcad/pipeline.hpp"
#include "test_util.hpp"

using namespace mcad;
using mcad::testing::random_tensor;
using mcad::testing::random_vector;

namespace {

ingest::SyntheticScenario small_scenario() {
  ingest::SyntheticScenario s;
  s.seed = 5;
  s.duration_steps = 400;
  ingest::ProviderProfile p;
  p.name = "aws";
  p.channels = {{"cpu", 0.5, 0.05, 0.02}, {"mem", 0.6, 0.05, 0.02}};
  s.providers = {p};
  for (std::size_t i = 0; i < 6; ++i) {
    ingest::FaultSpec f;
    f.start_step = 40 + i * 60;
    f.length = 4;
    f.kind = i % 2 ? ingest::FaultKind::kLogBurst : ingest::FaultKind::kSpike;
    f.magnitude = i % 2 ? 4.0 : 10.0;
    f.provider = "aws";
    s.faults.push_back(f);
  }
  return s;
}

PipelineConfig small_config() {
  PipelineConfig c;
  c.extractor.branch_channels = 4;
  c.extractor.cnn_dim = 8;
  c.extractor.lstm_hidden = 6;
  c.extractor.context_dim = 8;
  c.logsem.context_dim = 8;
  c.logsem.embed_dim = 16;
  c.extractor.attn_dk = 8;
  c.extractor.attn_dv = 12;
  c.detector.epochs = 2;
  c.data.train_stride = 3;
  return c;
}

const TrainedModel& trained() {
  static const TrainedModel m = [] {
    const auto stream = ingest::generate(small_scenario());
    return train_pipeline(stream.records, small_config(), 3);
  }();
  return m;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("mcad_test_" + name);
}

ErrorCode code_of(const std::string& text) {
  try {
    checkpoint_from_string(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("round trip reproduces every parameter block") {
  const auto& m = trained();
  const std::string text = checkpoint_to_string(m);
  const TrainedModel back = checkpoint_from_string(text);
  std::vector<std::vector<double>> a, b;
  m.model.extractor.for_each_param(ExtractorParams::ConstVisitor(
      [&](const std::string&, const std::vector<std::size_t>&, std::span<const double> v) {
        a.emplace_back(v.begin(), v.end());
      }));
  back.model.extractor.for_each_param(ExtractorParams::ConstVisitor(
      [&](const std::string&, const std::vector<std::size_t>&, std::span<const double> v) {
        b.emplace_back(v.begin(), v.end());
      }));
  CHECK(a == b);
  for (std::size_t i = 0; i < m.model.extractor.norms.size(); ++i) {
    CHECK(back.model.extractor.norms[i].running_mean == m.model.extractor.norms[i].running_mean);
    CHECK(back.model.extractor.norms[i].running_var == m.model.extractor.norms[i].running_var);
  }
  CHECK(back.model.svm.w == m.model.svm.w);
  CHECK(back.model.svm.b == m.model.svm.b);
  CHECK(back.stats.mean == m.stats.mean);
  CHECK(back.stats.stddev == m.stats.stddev);
  CHECK(back.likelihood.p_anomalous == m.likelihood.p_anomalous);
  CHECK(back.report.objectives == m.report.objectives);
  CHECK(back.config.extractor.lstm_hidden == 6);
  CHECK(checkpoint_to_string(back) == text);
}

TEST_CASE("100 random window scores survive a file round trip") {
  const auto& m = trained();
  const auto path = temp_path("ckpt.json");
  save_checkpoint(m, path);
  const TrainedModel back = load_checkpoint(path);
  std::filesystem::remove(path);
  Rng rng(7);
  const auto& cfg = m.model.extractor_config;
  for (int i = 0; i < 100; ++i) {
    const auto w = random_tensor(rng, cfg.window, cfg.channels, 3.0);
    const auto c = random_vector(rng, cfg.context_dim);
    CHECK(score(w, c, back.model) == score(w, c, m.model));
  }
}

TEST_CASE("rff models round trip") {
  PipelineConfig cfg = small_config();
  cfg.detector.kernel = SvmKernel::kRff;
  cfg.detector.rff_dim = 16;
  cfg.detector.epochs = 1;
  const auto stream = ingest::generate(small_scenario());
  const TrainedModel m = train_pipeline(stream.records, cfg, 4);
  const TrainedModel back = checkpoint_from_string(checkpoint_to_string(m));
  REQUIRE(back.model.rff.has_value());
  CHECK(back.model.rff->omega == m.model.rff->omega);
  CHECK(back.model.rff->phase == m.model.rff->phase);
  Rng rng(8);
  const auto w = random_tensor(rng, 10, 2);
  const auto c = random_vector(rng, 8);
  CHECK(score(w, c, back.model) == score(w, c, m.model));
}

TEST_CASE("corrupt, truncated and foreign checkpoints are rejected") {
  const std::string text = checkpoint_to_string(trained());
  CHECK(code_of(text.substr(0, text.size() / 2)) == ErrorCode::CorruptCheckpoint);
  CHECK(code_of("") == ErrorCode::CorruptCheckpoint);

  auto j = nlohmann::json::parse(text);
  j["format_version"] = 999;
  CHECK(code_of(j.dump()) == ErrorCode::UnknownVersion);

  j = nlohmann::json::parse(text);
  j["parameters"][0]["data"].erase(0);
  CHECK(code_of(j.dump()) == ErrorCode::CorruptCheckpoint);

  j = nlohmann::json::parse(text);
  j["parameters"].erase(1);
  CHECK(code_of(j.dump()) == ErrorCode::CorruptCheckpoint);

  try {
    load_checkpoint(temp_path("does-not-exist.json"));
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
  }
}

TEST_CASE("checkpoint records metadata without timestamps") {
  const auto j = nlohmann::json::parse(checkpoint_to_string(trained()));
  CHECK(j["format_version"] == kCheckpointVersion);
  CHECK(j["metadata"]["train_seed"] == 3);
  CHECK(j["metadata"]["epochs"] == 2);
  CHECK_FALSE(j["metadata"].contains("created_at"));
  bool saw_svm = false;
  for (const auto& block : j["parameters"]) {
    std::size_t n = 1;
    for (std::size_t d : block["shape"]) n *= d;
    CHECK(block["data"].size() == n);
    saw_svm |= block["name"] == "svm.w";
  }
  CHECK(saw_svm);
}
