// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <unordered_set>

#include "mcad/error.hpp"
#include "mcad/logsem.hpp"

namespace mcad::logsem {

namespace {

bool is_number(std::string_view tok) {
  std::size_t i = 0;
  if (i < tok.size() && (tok[i] == '-' || tok[i] == '+')) ++i;
  bool digits = false;
  bool dot = false;
  for (; i < tok.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(tok[i]))) {
      digits = true;
    } else if (tok[i] == '.' && !dot) {
      dot = true;
    } else {
      return false;
    }
  }
  return digits;
}

bool is_ipv4(std::string_view tok) {
  int parts = 0;
  std::size_t i = 0;
  while (i <= tok.size()) {
    std::size_t j = i;
    int value = 0;
    while (j < tok.size() && std::isdigit(static_cast<unsigned char>(tok[j]))) {
      value = value * 10 + (tok[j] - '0');
      if (j - i >= 3) return false;
      ++j;
    }
    if (j == i || value > 255) return false;
    ++parts;
    if (j == tok.size()) break;
    if (tok[j] != '.') return false;
    i = j + 1;
  }
  return parts == 4;
}

bool is_hex_id(std::string_view tok) {
  return tok.size() >= 8 &&
         std::all_of(tok.begin(), tok.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); });
}

}  // namespace

std::vector<std::string> abstract_keywords(std::string_view line) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (auto& tok : tokenize(line)) {
    std::string kw;
    if (is_ipv4(tok)) {
      kw = "<IP>";
    } else if (is_number(tok)) {
      kw = "<NUM>";
    } else if (is_hex_id(tok)) {
      kw = "<HEX>";
    } else {
      kw = std::move(tok);
      std::transform(kw.begin(), kw.end(), kw.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    }
    if (seen.insert(kw).second) out.push_back(std::move(kw));
  }
  return out;
}

std::uint64_t murmur64(std::string_view data, std::uint64_t seed) {
  constexpr std::uint64_t m = 0xc6a4a7935bd1e995ULL;
  constexpr int r = 47;
  const std::size_t len = data.size();
  std::uint64_t h = seed ^ (len * m);
  const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());
  const std::size_t blocks = len / 8;
  for (std::size_t i = 0; i < blocks; ++i) {
    std::uint64_t k = 0;
    // Little-endian assembly keeps the hash identical on every host.
    for (int b = 7; b >= 0; --b) k = (k << 8) | bytes[i * 8 + static_cast<std::size_t>(b)];
    k *= m;
    k ^= k >> r;
    k *= m;
    h ^= k;
    h *= m;
  }
  const unsigned char* tail = bytes + blocks * 8;
  switch (len & 7) {
    case 7: h ^= std::uint64_t(tail[6]) << 48; [[fallthrough]];
    case 6: h ^= std::uint64_t(tail[5]) << 40; [[fallthrough]];
    case 5: h ^= std::uint64_t(tail[4]) << 32; [[fallthrough]];
    case 4: h ^= std::uint64_t(tail[3]) << 24; [[fallthrough]];
    case 3: h ^= std::uint64_t(tail[2]) << 16; [[fallthrough]];
    case 2: h ^= std::uint64_t(tail[1]) << 8; [[fallthrough]];
    case 1:
      h ^= std::uint64_t(tail[0]);
      h *= m;
  }
  h ^= h >> r;
  h *= m;
  h ^= h >> r;
  return h;
}

nk::Tensor2 encode_fallback(const StructuredSequence& structured, std::size_t dim) {
  if (dim == 0) throw Error(ErrorCode::InvalidArgument, "embedding dimension must be >= 1");
  nk::Tensor2 out(structured.size(), dim);
  for (std::size_t r = 0; r < structured.size(); ++r) {
    const auto& line = structured[r];
    std::size_t count = 0;
    auto add = [&](const std::string& token) {
      const std::uint64_t h = murmur64(token, 0);
      const double sign = (h >> 63) ? -1.0 : 1.0;
      out(r, h % dim) += sign;
      ++count;
    };
    add("tpl:" + std::to_string(line.template_id));
    for (const auto& kw : line.keywords) add("kw:" + kw);
    const double s = 1.0 / std::sqrt(static_cast<double>(count));
    for (double& v : out.row(r)) v *= s;
  }
  return out;
}

std::string_view to_string(ContextSource source) {
  switch (source) {
    case ContextSource::kRemote: return "remote";
    case ContextSource::kFallback: return "fallback";
    case ContextSource::kEmpty: return "empty";
  }
  return "unknown";
}

SemanticContext pool_context(const nk::Tensor2& embeddings, std::size_t k, ContextSource source) {
  SemanticContext ctx;
  ctx.values.assign(k, 0.0);
  if (embeddings.rows() == 0) {
    ctx.source = ContextSource::kEmpty;
    return ctx;
  }
  const auto mean = nk::column_mean(embeddings);
  std::copy_n(mean.begin(), std::min(k, mean.size()), ctx.values.begin());
  ctx.source = source;
  return ctx;
}

}  // namespace mcad::logsem
