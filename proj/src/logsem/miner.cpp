// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>

#include "mcad/error.hpp"
#include "mcad/logsem.hpp"

namespace mcad::logsem {

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

std::string LogTemplate::text() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

namespace {

double similarity(const LogTemplate& tpl, const std::vector<std::string>& tokens) {
  std::size_t fixed = 0;
  std::size_t equal = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tpl.tokens[i] == kWildcard) continue;
    ++fixed;
    if (tpl.tokens[i] == tokens[i]) ++equal;
  }
  return fixed == 0 ? 0.0 : static_cast<double>(equal) / static_cast<double>(fixed);
}

}  // namespace

std::optional<std::pair<int, double>> TemplateMiner::best_match(
    const std::vector<std::string>& tokens) const {
  auto group = by_length_.find(tokens.size());
  if (group == by_length_.end()) return std::nullopt;
  std::optional<std::pair<int, double>> best;
  for (int id : group->second) {
    const double sim = similarity(templates_[static_cast<std::size_t>(id)], tokens);
    // Ids within a group are increasing, so strict > keeps the lowest id on ties.
    if (sim >= threshold_ && (!best || sim > best->second)) best = std::make_pair(id, sim);
  }
  return best;
}

int TemplateMiner::mine(std::string_view line) {
  auto tokens = tokenize(line);
  if (tokens.empty()) throw Error(ErrorCode::InvalidArgument, "cannot mine an empty log line");
  if (auto hit = best_match(tokens)) {
    auto& tpl = templates_[static_cast<std::size_t>(hit->first)];
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (tpl.tokens[i] != tokens[i]) tpl.tokens[i] = std::string(kWildcard);
    }
    ++tpl.match_count;
    return tpl.template_id;
  }
  const int id = static_cast<int>(templates_.size());
  by_length_[tokens.size()].push_back(id);
  templates_.push_back({id, std::move(tokens), 1});
  return id;
}

std::optional<int> TemplateMiner::match(std::string_view line) const {
  auto hit = best_match(tokenize(line));
  if (!hit) return std::nullopt;
  return hit->first;
}

const LogTemplate& TemplateMiner::get(int template_id) const {
  if (template_id < 0 || static_cast<std::size_t>(template_id) >= templates_.size())
    throw Error(ErrorCode::InvalidArgument, "unknown template id " + std::to_string(template_id));
  return templates_[static_cast<std::size_t>(template_id)];
}

nlohmann::json TemplateMiner::to_json() const {
  nlohmann::json j;
  j["threshold"] = threshold_;
  j["templates"] = nlohmann::json::array();
  for (const auto& t : templates_) {
    j["templates"].push_back({{"id", t.template_id}, {"tokens", t.tokens}, {"count", t.match_count}});
  }
  return j;
}

TemplateMiner TemplateMiner::from_json(const nlohmann::json& j) {
  try {
    TemplateMiner m(j.at("threshold").get<double>());
    for (const auto& tj : j.at("templates")) {
      LogTemplate t;
      t.template_id = tj.at("id").get<int>();
      t.tokens = tj.at("tokens").get<std::vector<std::string>>();
      t.match_count = tj.at("count").get<std::size_t>();
      if (t.template_id != static_cast<int>(m.templates_.size()) || t.tokens.empty())
        throw Error(ErrorCode::CorruptCheckpoint, "miner template ids must be dense and nonempty");
      m.by_length_[t.tokens.size()].push_back(t.template_id);
      m.templates_.push_back(std::move(t));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptCheckpoint, std::string("miner state: ") + e.what());
  }
}

StructuredLine structure_line(std::string_view line, TemplateMiner& miner) {
  return {miner.mine(line), abstract_keywords(line)};
}

}  // namespace mcad::logsem
