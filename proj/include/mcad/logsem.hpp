// SPDX-License-Identifier: Apache-2.0
#pragma once

// Log semantics: template mining, keyword abstraction, contextual embeddings
// (remote service or deterministic hashing fallback) and pooling into the
// per-window context vector.

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mcad/numkit/tensor.hpp"
#include "mcad/telemetry.hpp"

namespace mcad::logsem {

inline constexpr std::string_view kWildcard = "<*>";

struct LogTemplate {
  int template_id = 0;
  std::vector<std::string> tokens;
  std::size_t match_count = 0;

  std::string text() const;
};

// Streaming similarity miner in the style of Drain: templates are grouped by
// token count; a line joins the most similar template of its length when the
// fraction of equal tokens among the template's non-wildcard positions reaches
// the threshold, and differing positions become wildcards. Single writer.
class TemplateMiner {
 public:
  explicit TemplateMiner(double threshold = 0.5) : threshold_(threshold) {}

  // `line` must contain at least one token.
  int mine(std::string_view line);
  // Lookup without updating state.
  std::optional<int> match(std::string_view line) const;

  const std::vector<LogTemplate>& templates() const { return templates_; }
  const LogTemplate& get(int template_id) const;
  double threshold() const { return threshold_; }

  nlohmann::json to_json() const;
  static TemplateMiner from_json(const nlohmann::json& j);

 private:
  std::optional<std::pair<int, double>> best_match(const std::vector<std::string>& tokens) const;

  double threshold_;
  std::vector<LogTemplate> templates_;
  std::map<std::size_t, std::vector<int>> by_length_;
};

std::vector<std::string> tokenize(std::string_view line);

// Numbers -> <NUM>, IPv4 -> <IP>, hex ids of >= 8 chars -> <HEX>, everything
// else lowercased; duplicates dropped keeping the first occurrence.
std::vector<std::string> abstract_keywords(std::string_view line);

struct StructuredLine {
  int template_id = 0;
  std::vector<std::string> keywords;
  friend bool operator==(const StructuredLine&, const StructuredLine&) = default;
};
using StructuredSequence = std::vector<StructuredLine>;

StructuredLine structure_line(std::string_view line, TemplateMiner& miner);

// MurmurHash64A; the fallback encoder always uses seed 0.
std::uint64_t murmur64(std::string_view data, std::uint64_t seed = 0);

// Signed feature hashing of each line's template token and keyword tokens,
// scaled by 1/sqrt(token count). One row per line.
nk::Tensor2 encode_fallback(const StructuredSequence& structured, std::size_t dim);

enum class ContextSource { kRemote, kFallback, kEmpty };
std::string_view to_string(ContextSource source);

struct SemanticContext {
  std::vector<double> values;
  ContextSource source = ContextSource::kEmpty;
};

// Row mean, then truncated or zero-padded to k. An empty matrix gives the zero
// vector with source kEmpty.
SemanticContext pool_context(const nk::Tensor2& embeddings, std::size_t k,
                             ContextSource source = ContextSource::kFallback);

// ---------------------------------------------------------------------------
// Remote embedding service: POST {path} {"texts": [...]} ->
// {"embeddings": [[...], ...], "dim": d}

struct RemoteConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string path = "/v1/embed";
  std::size_t dim = 64;
  std::size_t batch_size = 32;
  std::size_t max_concurrency = 4;
  int max_attempts = 3;
  int backoff_initial_ms = 50;
  double backoff_multiplier = 2.0;
  int connect_timeout_ms = 1000;
  int read_timeout_ms = 5000;
};

class RemoteEncoder {
 public:
  explicit RemoteEncoder(RemoteConfig config) : config_(std::move(config)) {}

  // One row per text, in input order. Throws ServiceUnavailable, Timeout or
  // DimensionMismatch; never returns a partial matrix.
  nk::Tensor2 encode(const std::vector<std::string>& texts);

  // Total HTTP attempts issued by this encoder.
  std::size_t attempts() const { return attempts_.load(); }
  const RemoteConfig& config() const { return config_; }

 private:
  nk::Tensor2 encode_batch(std::span<const std::string> texts);

  RemoteConfig config_;
  std::atomic<std::size_t> attempts_{0};
};

// ---------------------------------------------------------------------------

enum class EncoderMode { kFallbackOnly, kRemoteWithFallback, kRemoteStrict };
std::string_view to_string(EncoderMode mode);
EncoderMode encoder_mode_from_string(std::string_view name);

struct LogSemConfig {
  EncoderMode mode = EncoderMode::kFallbackOnly;
  std::size_t embed_dim = 64;
  std::size_t context_dim = 64;
  double miner_threshold = 0.5;
  RemoteConfig remote;
};

struct RecordEmbeddings {
  std::vector<nk::Tensor2> per_record;  // rows = that record's log lines
  ContextSource source = ContextSource::kFallback;
};

// Turns record log lines into per-record embedding rows and windows of those
// into context vectors. Owns the miner, so it is not thread-safe.
class ContextEncoder {
 public:
  explicit ContextEncoder(LogSemConfig config, TemplateMiner miner = TemplateMiner{});

  RecordEmbeddings embed_records(std::span<const TelemetryRecord> records);
  SemanticContext window_context(const RecordEmbeddings& embeddings, std::size_t start,
                                 std::size_t length) const;

  TemplateMiner& miner() { return miner_; }
  const TemplateMiner& miner() const { return miner_; }
  const LogSemConfig& config() const { return config_; }
  const std::optional<std::string>& last_remote_error() const { return last_remote_error_; }

 private:
  LogSemConfig config_;
  TemplateMiner miner_;
  std::unique_ptr<RemoteEncoder> remote_;
  std::optional<std::string> last_remote_error_;
};

}  // namespace mcad::logsem
