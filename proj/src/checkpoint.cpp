// SPDX-License-Identifier: Apache-2.0

#include "mcad/checkpoint.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "mcad/error.hpp"

namespace mcad {

using nlohmann::json;

namespace {

using Shape = std::vector<std::size_t>;

json block(const std::string& name, const Shape& shape, std::span<const double> values) {
  return {{"name", name}, {"shape", shape}, {"data", std::vector<double>(values.begin(), values.end())}};
}

[[noreturn]] void corrupt(const std::string& what) { throw Error(ErrorCode::CorruptCheckpoint, what); }

// Index of blocks by name, validated against their declared shapes.
std::map<std::string, const json*> index_blocks(const json& blocks) {
  if (!blocks.is_array()) corrupt("parameter list is not an array");
  std::map<std::string, const json*> out;
  for (const auto& b : blocks) {
    const auto name = b.at("name").get<std::string>();
    const auto shape = b.at("shape").get<Shape>();
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    if (!b.at("data").is_array() || b.at("data").size() != n) corrupt("block '" + name + "' does not match its shape");
    if (!out.emplace(name, &b).second) corrupt("duplicate block '" + name + "'");
  }
  return out;
}

void fill(const std::map<std::string, const json*>& blocks, const std::string& name, const Shape& shape,
          std::span<double> out) {
  auto it = blocks.find(name);
  if (it == blocks.end()) corrupt("missing block '" + name + "'");
  if (it->second->at("shape").get<Shape>() != shape) corrupt("block '" + name + "' has an unexpected shape");
  const json& data = it->second->at("data");
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = data[i].get<double>();
}

json to_document(const TrainedModel& m) {
  json j;
  j["format_version"] = kCheckpointVersion;
  j["config"] = to_json(m.config);

  json params = json::array();
  m.model.extractor.for_each_param(ExtractorParams::ConstVisitor(
      [&](const std::string& name, const Shape& shape, std::span<const double> v) {
        params.push_back(block(name, shape, v));
      }));
  params.push_back(block("svm.w", {m.model.svm.w.size()}, m.model.svm.w));
  params.push_back(block("svm.b", {1}, std::span<const double>(&m.model.svm.b, 1)));
  if (m.model.rff) {
    const RffMap& r = *m.model.rff;
    params.push_back(block("rff.omega", {r.omega.rows(), r.omega.cols()}, r.omega.flat()));
    params.push_back(block("rff.phase", {r.phase.size()}, r.phase));
    params.push_back(block("rff.gamma", {1}, std::span<const double>(&r.gamma, 1)));
  }
  j["parameters"] = std::move(params);

  json buffers = json::array();
  m.model.extractor.for_each_buffer(ExtractorParams::ConstVisitor(
      [&](const std::string& name, const Shape& shape, std::span<const double> v) {
        buffers.push_back(block(name, shape, v));
      }));
  j["buffers"] = std::move(buffers);

  j["miner"] = m.miner.to_json();
  j["channel_stats"] = {{"mean", m.stats.mean}, {"stddev", m.stats.stddev}};
  j["likelihood"] = m.likelihood.to_json();
  j["metadata"] = {{"producer", "mcad"},
                   {"train_seed", m.report.seed},
                   {"epochs", m.report.epochs},
                   {"objectives", m.report.objectives},
                   {"final_objective", m.report.final_objective}};
  return j;
}

TrainedModel from_document(const json& j) {
  if (!j.is_object() || !j.contains("format_version")) corrupt("missing format_version");
  const int version = j.at("format_version").get<int>();
  if (version != kCheckpointVersion)
    throw Error(ErrorCode::UnknownVersion, "checkpoint format version " + std::to_string(version));

  TrainedModel m;
  m.config = config_from_json(j.at("config"));
  m.model.extractor_config = m.config.extractor;
  m.model.extractor = ExtractorParams::zeros(m.config.extractor);

  const auto params = index_blocks(j.at("parameters"));
  m.model.extractor.for_each_param(ExtractorParams::Visitor(
      [&](const std::string& name, const Shape& shape, std::span<double> v) { fill(params, name, shape, v); }));

  std::size_t feature_dim = m.config.extractor.attn_dv;
  if (m.config.detector.kernel == SvmKernel::kRff) {
    RffMap r;
    const std::size_t d = m.config.detector.rff_dim;
    r.omega = nk::Tensor2(d, feature_dim);
    r.phase.resize(d);
    fill(params, "rff.omega", {d, feature_dim}, r.omega.flat());
    fill(params, "rff.phase", {d}, r.phase);
    fill(params, "rff.gamma", {1}, std::span<double>(&r.gamma, 1));
    m.model.rff = std::move(r);
    feature_dim = d;
  }
  m.model.svm = SvmParams::zeros(feature_dim, m.config.detector.c, m.config.detector.learning_rate);
  fill(params, "svm.w", {feature_dim}, m.model.svm.w);
  fill(params, "svm.b", {1}, std::span<double>(&m.model.svm.b, 1));

  const auto buffers = index_blocks(j.at("buffers"));
  m.model.extractor.for_each_buffer(ExtractorParams::Visitor(
      [&](const std::string& name, const Shape& shape, std::span<double> v) { fill(buffers, name, shape, v); }));

  m.miner = logsem::TemplateMiner::from_json(j.at("miner"));
  m.stats.mean = j.at("channel_stats").at("mean").get<std::vector<double>>();
  m.stats.stddev = j.at("channel_stats").at("stddev").get<std::vector<double>>();
  if (m.stats.mean.size() != m.config.extractor.channels || m.stats.stddev.size() != m.stats.mean.size())
    corrupt("channel statistics do not match the channel count");
  m.likelihood = LikelihoodModel::from_json(j.at("likelihood"));

  const json& meta = j.at("metadata");
  m.report.seed = meta.at("train_seed").get<std::uint64_t>();
  m.report.epochs = meta.at("epochs").get<std::size_t>();
  m.report.objectives = meta.at("objectives").get<std::vector<double>>();
  m.report.final_objective = meta.at("final_objective").get<double>();
  return m;
}

}  // namespace

std::string checkpoint_to_string(const TrainedModel& model) { return to_document(model).dump(1) + "\n"; }

TrainedModel checkpoint_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    corrupt(std::string("unreadable checkpoint: ") + e.what());
  }
  try {
    return from_document(j);
  } catch (const json::exception& e) {
    corrupt(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const TrainedModel& model, const std::filesystem::path& path) {
  const std::string text = checkpoint_to_string(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write checkpoint " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "failed writing checkpoint " + path.string());
}

TrainedModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_string(buf.str());
}

}  // namespace mcad
