// SPDX-License-Identifier: Apache-2.0

#include "mcad/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "mcad/error.hpp"

namespace mcad {

using nlohmann::json;

namespace {

// Reads optional keys of one JSON object and rejects any it did not ask for.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw Error(ErrorCode::InvalidArgument, "config section '" + name_ + "' must be an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, _] : j_.items())
      if (!seen_.count(key)) throw Error(ErrorCode::InvalidArgument, "unknown config key '" + name_ + "." + key + "'");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidArgument, "config key '" + name_ + "." + key + "': " + e.what());
    }
  }
  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

std::string bn_mode_name(nk::BnMode m) { return m == nk::BnMode::kInference ? "inference" : "training"; }

nk::BnMode bn_mode_from(const std::string& s) {
  if (s == "inference") return nk::BnMode::kInference;
  if (s == "training") return nk::BnMode::kTraining;
  throw Error(ErrorCode::InvalidArgument, "unknown batch-norm mode '" + s + "'");
}

}  // namespace

void PipelineConfig::validate() const {
  extractor.validate();
  detector.validate();
  warning.validate();
  if (data.train_stride == 0 || data.eval_stride == 0 || data.anomalous_stride == 0) throw Error(ErrorCode::InvalidArgument, "strides must be positive");
  if (!(data.train_fraction > 0.0 && data.train_fraction < 1.0))
    throw Error(ErrorCode::InvalidArgument, "train_fraction must lie in (0, 1)");
  if (eval.grace_steps < warning.persistence)
    throw Error(ErrorCode::InvalidArgument, "grace window must be at least the persistence");
  if (!(eval.baseline_k > 0.0)) throw Error(ErrorCode::InvalidArgument, "baseline k must be positive");
  if (logsem.context_dim != extractor.context_dim)
    throw Error(ErrorCode::InvalidArgument, "logsem.context_dim and extractor.context_dim differ");
}

json to_json(const PipelineConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["data"] = {{"train_stride", c.data.train_stride},
               {"anomalous_stride", c.data.anomalous_stride},
               {"eval_stride", c.data.eval_stride},
               {"train_fraction", c.data.train_fraction}};
  const auto& e = c.extractor;
  j["extractor"] = {{"channels", e.channels},         {"window", e.window},
                    {"kernel_sizes", e.kernel_sizes}, {"branch_channels", e.branch_channels},
                    {"cnn_dim", e.cnn_dim},           {"lstm_hidden", e.lstm_hidden},
                    {"lstm_layers", e.lstm_layers},   {"context_dim", e.context_dim},
                    {"attn_dk", e.attn_dk},           {"attn_dv", e.attn_dv},
                    {"bn_epsilon", e.bn_epsilon},     {"bn_mode", bn_mode_name(e.bn_mode)}};
  const auto& d = c.detector;
  j["detector"] = {{"kernel", std::string(to_string(d.kernel))},
                   {"rff_dim", d.rff_dim},
                   {"rff_gamma", d.rff_gamma},
                   {"c", d.c},
                   {"learning_rate", d.learning_rate},
                   {"batch_size", d.batch_size},
                   {"epochs", d.epochs},
                   {"joint", d.joint},
                   {"extractor_lr_scale", d.extractor_lr_scale}};
  const auto& w = c.warning;
  j["warning"] = {{"bins", w.bins},
                  {"pseudo_count", w.pseudo_count},
                  {"threshold", w.threshold},
                  {"persistence", w.persistence},
                  {"verbose", w.verbose}};
  const auto& l = c.logsem;
  const auto& r = l.remote;
  j["logsem"] = {{"mode", std::string(logsem::to_string(l.mode))},
                 {"embed_dim", l.embed_dim},
                 {"context_dim", l.context_dim},
                 {"miner_threshold", l.miner_threshold},
                 {"remote",
                  {{"host", r.host},
                   {"port", r.port},
                   {"path", r.path},
                   {"dim", r.dim},
                   {"batch_size", r.batch_size},
                   {"max_concurrency", r.max_concurrency},
                   {"max_attempts", r.max_attempts},
                   {"backoff_initial_ms", r.backoff_initial_ms},
                   {"backoff_multiplier", r.backoff_multiplier},
                   {"connect_timeout_ms", r.connect_timeout_ms},
                   {"read_timeout_ms", r.read_timeout_ms}}}};
  j["eval"] = {{"grace_steps", c.eval.grace_steps}, {"baseline_k", c.eval.baseline_k}};
  return j;
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  {
    Section root(j, "config");
    root.read("seed", c.seed);
    if (const json* s = root.child("data")) {
      Section d(*s, "data");
      d.read("train_stride", c.data.train_stride);
      d.read("anomalous_stride", c.data.anomalous_stride);
      d.read("eval_stride", c.data.eval_stride);
      d.read("train_fraction", c.data.train_fraction);
    }
    if (const json* s = root.child("extractor")) {
      Section x(*s, "extractor");
      auto& e = c.extractor;
      x.read("channels", e.channels);
      x.read("window", e.window);
      x.read("kernel_sizes", e.kernel_sizes);
      x.read("branch_channels", e.branch_channels);
      x.read("cnn_dim", e.cnn_dim);
      x.read("lstm_hidden", e.lstm_hidden);
      x.read("lstm_layers", e.lstm_layers);
      x.read("context_dim", e.context_dim);
      x.read("attn_dk", e.attn_dk);
      x.read("attn_dv", e.attn_dv);
      x.read("bn_epsilon", e.bn_epsilon);
      std::string mode = bn_mode_name(e.bn_mode);
      x.read("bn_mode", mode);
      e.bn_mode = bn_mode_from(mode);
    }
    if (const json* s = root.child("detector")) {
      Section x(*s, "detector");
      auto& d = c.detector;
      std::string kernel(to_string(d.kernel));
      x.read("kernel", kernel);
      d.kernel = svm_kernel_from_string(kernel);
      x.read("rff_dim", d.rff_dim);
      x.read("rff_gamma", d.rff_gamma);
      x.read("c", d.c);
      x.read("learning_rate", d.learning_rate);
      x.read("batch_size", d.batch_size);
      x.read("epochs", d.epochs);
      x.read("joint", d.joint);
      x.read("extractor_lr_scale", d.extractor_lr_scale);
    }
    if (const json* s = root.child("warning")) {
      Section x(*s, "warning");
      auto& w = c.warning;
      x.read("bins", w.bins);
      x.read("pseudo_count", w.pseudo_count);
      x.read("threshold", w.threshold);
      x.read("persistence", w.persistence);
      x.read("verbose", w.verbose);
    }
    if (const json* s = root.child("logsem")) {
      Section x(*s, "logsem");
      auto& l = c.logsem;
      std::string mode(logsem::to_string(l.mode));
      x.read("mode", mode);
      l.mode = logsem::encoder_mode_from_string(mode);
      x.read("embed_dim", l.embed_dim);
      x.read("context_dim", l.context_dim);
      x.read("miner_threshold", l.miner_threshold);
      if (const json* rs = x.child("remote")) {
        Section y(*rs, "logsem.remote");
        auto& r = l.remote;
        y.read("host", r.host);
        y.read("port", r.port);
        y.read("path", r.path);
        y.read("dim", r.dim);
        y.read("batch_size", r.batch_size);
        y.read("max_concurrency", r.max_concurrency);
        y.read("max_attempts", r.max_attempts);
        y.read("backoff_initial_ms", r.backoff_initial_ms);
        y.read("backoff_multiplier", r.backoff_multiplier);
        y.read("connect_timeout_ms", r.connect_timeout_ms);
        y.read("read_timeout_ms", r.read_timeout_ms);
      }
    }
    if (const json* s = root.child("eval")) {
      Section x(*s, "eval");
      x.read("grace_steps", c.eval.grace_steps);
      x.read("baseline_k", c.eval.baseline_k);
    }
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, "config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace mcad
