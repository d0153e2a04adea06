// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "mcad/error.hpp"
#include "mcad/logsem.hpp"

namespace mcad::logsem {

std::string_view to_string(EncoderMode mode) {
  switch (mode) {
    case EncoderMode::kFallbackOnly: return "fallback";
    case EncoderMode::kRemoteWithFallback: return "remote-with-fallback";
    case EncoderMode::kRemoteStrict: return "remote-strict";
  }
  return "unknown";
}

EncoderMode encoder_mode_from_string(std::string_view name) {
  if (name == "fallback") return EncoderMode::kFallbackOnly;
  if (name == "remote-with-fallback") return EncoderMode::kRemoteWithFallback;
  if (name == "remote-strict") return EncoderMode::kRemoteStrict;
  throw Error(ErrorCode::InvalidArgument, "unknown encoder mode '" + std::string(name) + "'");
}

ContextEncoder::ContextEncoder(LogSemConfig config, TemplateMiner miner)
    : config_(std::move(config)), miner_(std::move(miner)) {
  if (config_.mode != EncoderMode::kFallbackOnly) {
    RemoteConfig rc = config_.remote;
    rc.dim = config_.embed_dim;
    remote_ = std::make_unique<RemoteEncoder>(std::move(rc));
  }
}

RecordEmbeddings ContextEncoder::embed_records(std::span<const TelemetryRecord> records) {
  // Mine every line in stream order first; the miner is the only state.
  std::vector<std::size_t> line_counts;
  StructuredSequence structured;
  line_counts.reserve(records.size());
  for (const auto& rec : records) {
    std::size_t n = 0;
    for (const auto& line : rec.log_lines) {
      if (tokenize(line).empty()) continue;
      structured.push_back(structure_line(line, miner_));
      ++n;
    }
    line_counts.push_back(n);
  }

  nk::Tensor2 rows;
  ContextSource source = ContextSource::kFallback;
  const bool want_remote = config_.mode != EncoderMode::kFallbackOnly && remote_ && !structured.empty();
  bool have_rows = false;
  if (want_remote) {
    std::vector<std::string> texts;
    texts.reserve(structured.size());
    for (const auto& line : structured) {
      std::string text = miner_.get(line.template_id).text();
      for (const auto& kw : line.keywords) text += " " + kw;
      texts.push_back(std::move(text));
    }
    try {
      rows = remote_->encode(texts);
      source = ContextSource::kRemote;
      have_rows = true;
      last_remote_error_.reset();
    } catch (const Error& e) {
      if (config_.mode == EncoderMode::kRemoteStrict) throw;
      last_remote_error_ = e.what();
    }
  }
  if (!have_rows) rows = encode_fallback(structured, config_.embed_dim);

  RecordEmbeddings out;
  out.source = source;
  out.per_record.reserve(records.size());
  std::size_t next = 0;
  for (std::size_t n : line_counts) {
    nk::Tensor2 block(n, config_.embed_dim);
    for (std::size_t r = 0; r < n; ++r) {
      auto src = rows.row(next + r);
      std::copy(src.begin(), src.end(), block.row(r).begin());
    }
    next += n;
    out.per_record.push_back(std::move(block));
  }
  return out;
}

SemanticContext ContextEncoder::window_context(const RecordEmbeddings& embeddings, std::size_t start,
                                               std::size_t length) const {
  if (start + length > embeddings.per_record.size())
    throw Error(ErrorCode::InvalidArgument, "window outside embedded records");
  std::size_t total = 0;
  for (std::size_t i = start; i < start + length; ++i) total += embeddings.per_record[i].rows();
  nk::Tensor2 stacked(total, config_.embed_dim);
  std::size_t row = 0;
  for (std::size_t i = start; i < start + length; ++i) {
    const auto& block = embeddings.per_record[i];
    std::copy(block.flat().begin(), block.flat().end(), stacked.storage().data() + row * config_.embed_dim);
    row += block.rows();
  }
  return pool_context(stacked, config_.context_dim, embeddings.source);
}

}  // namespace mcad::logsem
