// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cmath>
#include <future>
#include <thread>

#include "httplib.h"
#include "mcad/error.hpp"
#include "mcad/logsem.hpp"

namespace mcad::logsem {

using nlohmann::json;

namespace {

enum class Failure { kNone, kRetryable, kTimeout, kFatal };

struct AttemptResult {
  Failure failure = Failure::kNone;
  std::string message;
  std::optional<nk::Tensor2> matrix;
};

}  // namespace

nk::Tensor2 RemoteEncoder::encode_batch(std::span<const std::string> texts) {
  httplib::Client client(config_.host, config_.port);
  client.set_connection_timeout(std::chrono::milliseconds(config_.connect_timeout_ms));
  client.set_read_timeout(std::chrono::milliseconds(config_.read_timeout_ms));
  client.set_write_timeout(std::chrono::milliseconds(config_.read_timeout_ms));

  const std::string body = json{{"texts", std::vector<std::string>(texts.begin(), texts.end())}}.dump();

  auto attempt = [&]() -> AttemptResult {
    ++attempts_;
    auto res = client.Post(config_.path, body, "application/json");
    if (!res) {
      const auto err = res.error();
      const bool timeout = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read;
      return {timeout ? Failure::kTimeout : Failure::kRetryable, httplib::to_string(err), {}};
    }
    if (res->status >= 400 && res->status < 500) {
      return {Failure::kFatal, "service rejected request with HTTP " + std::to_string(res->status), {}};
    }
    if (res->status != 200) {
      return {Failure::kRetryable, "HTTP " + std::to_string(res->status), {}};
    }
    json payload;
    try {
      payload = json::parse(res->body);
    } catch (const json::parse_error& e) {
      return {Failure::kFatal, std::string("malformed response: ") + e.what(), {}};
    }
    try {
      const auto dim = payload.at("dim").get<std::size_t>();
      const auto& rows = payload.at("embeddings");
      if (dim != config_.dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    "service dim " + std::to_string(dim) + " != configured " + std::to_string(config_.dim));
      }
      if (!rows.is_array() || rows.size() != texts.size()) {
        return {Failure::kFatal, "response row count does not match request", {}};
      }
      nk::Tensor2 m(texts.size(), config_.dim);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != config_.dim) {
          throw Error(ErrorCode::DimensionMismatch, "embedding row " + std::to_string(r) + " has " +
                                                        std::to_string(rows[r].size()) + " values");
        }
        for (std::size_t c = 0; c < config_.dim; ++c) {
          const double v = rows[r][c].get<double>();
          if (!std::isfinite(v)) return {Failure::kFatal, "non-finite embedding value", {}};
          m(r, c) = v;
        }
      }
      return {Failure::kNone, {}, std::move(m)};
    } catch (const json::exception& e) {
      return {Failure::kFatal, std::string("malformed response: ") + e.what(), {}};
    }
  };

  const int max_attempts = std::max(1, config_.max_attempts);
  double backoff_ms = config_.backoff_initial_ms;
  AttemptResult last;
  for (int i = 0; i < max_attempts; ++i) {
    if (i > 0) {
      std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(backoff_ms));
      backoff_ms *= config_.backoff_multiplier;
    }
    last = attempt();
    if (last.failure == Failure::kNone) return std::move(*last.matrix);
    if (last.failure == Failure::kFatal) break;
  }
  if (last.failure == Failure::kTimeout)
    throw Error(ErrorCode::Timeout, "embedding service timed out: " + last.message);
  throw Error(ErrorCode::ServiceUnavailable, "embedding service failed: " + last.message);
}

nk::Tensor2 RemoteEncoder::encode(const std::vector<std::string>& texts) {
  if (texts.empty()) throw Error(ErrorCode::InvalidArgument, "no texts to embed");
  const std::size_t batch = std::max<std::size_t>(1, config_.batch_size);
  const std::size_t lanes = std::max<std::size_t>(1, config_.max_concurrency);
  const std::size_t n_batches = (texts.size() + batch - 1) / batch;
  std::vector<nk::Tensor2> parts(n_batches);

  // Waves of at most `lanes` concurrent requests; parts land by batch index,
  // so the output order never depends on completion order.
  for (std::size_t first = 0; first < n_batches; first += lanes) {
    const std::size_t last = std::min(n_batches, first + lanes);
    std::vector<std::future<nk::Tensor2>> inflight;
    for (std::size_t b = first; b < last; ++b) {
      const std::size_t begin = b * batch;
      const std::size_t count = std::min(batch, texts.size() - begin);
      std::span<const std::string> slice(texts.data() + begin, count);
      inflight.push_back(std::async(std::launch::async, [this, slice] { return encode_batch(slice); }));
    }
    std::exception_ptr failure;
    for (std::size_t i = 0; i < inflight.size(); ++i) {
      try {
        parts[first + i] = inflight[i].get();
      } catch (...) {
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  nk::Tensor2 out(texts.size(), config_.dim);
  std::size_t row = 0;
  for (const auto& p : parts) {
    std::copy(p.flat().begin(), p.flat().end(), out.row(row).begin());
    row += p.rows();
  }
  return out;
}

}  // namespace mcad::logsem
