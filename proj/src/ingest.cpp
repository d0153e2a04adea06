// SPDX-License-Identifier: Apache-2.0

#include "mcad/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "mcad/error.hpp"
#include "mcad/rng.hpp"

namespace mcad::ingest {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// RFC 4180 fields on a single physical line.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  if (quoted) throw Error(ErrorCode::ParseError, line_no, "unterminated quoted field");
  fields.push_back(std::move(cur));
  return fields;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  auto res = std::from_chars(first, t.data() + t.size(), out);
  return res.ec == std::errc() && res.ptr == t.data() + t.size();
}

std::optional<Label> parse_label_text(const std::string& text, std::size_t line_no) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  if (t == "0") return Label::kNormal;
  if (t == "1") return Label::kAnomalous;
  throw Error(ErrorCode::ParseError, line_no, "label must be 0 or 1, got '" + t + "'");
}

std::vector<std::string> split_logs(const std::string& text, char sep) {
  std::vector<std::string> lines;
  if (text.empty()) return lines;
  std::size_t pos = 0;
  while (true) {
    const auto next = text.find(sep, pos);
    std::string piece = trim(std::string_view(text).substr(pos, next - pos));
    if (!piece.empty()) lines.push_back(std::move(piece));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return lines;
}

}  // namespace

std::vector<TelemetryRecord> parse_csv(std::istream& in, const SchemaConfig& schema) {
  std::string line;
  if (!std::getline(in, line)) return {};
  const auto header = split_csv_line(line, 1);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) index[trim(header[i])] = i;

  auto find = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = index.find(name);
    if (it == index.end()) return std::nullopt;
    return it->second;
  };
  const auto ts_col = find(schema.timestamp_column);
  if (!ts_col) throw Error(ErrorCode::SchemaError, "missing timestamp column '" + schema.timestamp_column + "'");
  const auto provider_col = find(schema.provider_column);
  const auto service_col = find(schema.service_column);
  const auto label_col = find(schema.label_column);
  const auto log_col = find(schema.log_column);

  std::vector<std::size_t> metric_cols;
  if (!schema.metric_columns.empty()) {
    for (const auto& name : schema.metric_columns) {
      auto c = find(name);
      if (!c) throw Error(ErrorCode::SchemaError, "missing metric column '" + name + "'");
      metric_cols.push_back(*c);
    }
  } else {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i == *ts_col || i == provider_col || i == service_col || i == label_col || i == log_col)
        continue;
      metric_cols.push_back(i);
    }
  }
  if (metric_cols.empty()) throw Error(ErrorCode::SchemaError, "no metric columns");
  const std::size_t channels = schema.expected_channels ? schema.expected_channels : metric_cols.size();

  std::vector<TelemetryRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line, line_no);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::ParseError, line_no,
                  "expected " + std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    TelemetryRecord rec;
    if (!parse_number(fields[*ts_col], rec.timestamp))
      throw Error(ErrorCode::ParseError, line_no, "bad timestamp '" + fields[*ts_col] + "'");
    if (provider_col) rec.provider_id = fields[*provider_col];
    if (service_col) rec.service_id = fields[*service_col];
    rec.metrics.reserve(metric_cols.size());
    for (std::size_t c : metric_cols) {
      double v = 0.0;
      if (!parse_number(fields[c], v))
        throw Error(ErrorCode::ParseError, line_no, "bad metric value '" + fields[c] + "'");
      rec.metrics.push_back(v);
    }
    if (label_col) rec.label = parse_label_text(fields[*label_col], line_no);
    if (log_col) rec.log_lines = split_logs(fields[*log_col], schema.log_separator);
    validate_record(rec, channels);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<TelemetryRecord> parse_jsonl(std::istream& in, const SchemaConfig& schema) {
  std::vector<TelemetryRecord> records;
  std::string line;
  std::size_t line_no = 0;
  std::size_t channels = schema.expected_channels;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::ParseError, line_no, e.what());
    }
    if (!obj.is_object()) throw Error(ErrorCode::ParseError, line_no, "expected a JSON object");
    if (!obj.contains(schema.timestamp_column) || !obj.contains("metrics"))
      throw Error(ErrorCode::SchemaError, line_no, "record needs '" + schema.timestamp_column + "' and 'metrics'");
    TelemetryRecord rec;
    try {
      const auto& ts = obj.at(schema.timestamp_column);
      if (!ts.is_number_integer()) throw Error(ErrorCode::ParseError, line_no, "timestamp must be an integer");
      rec.timestamp = ts.get<std::int64_t>();
      const auto& metrics = obj.at("metrics");
      if (!metrics.is_array()) throw Error(ErrorCode::ParseError, line_no, "metrics must be an array");
      for (const auto& v : metrics) {
        if (!v.is_number()) throw Error(ErrorCode::ParseError, line_no, "metric is not a number");
        rec.metrics.push_back(v.get<double>());
      }
      if (auto it = obj.find(schema.provider_column); it != obj.end()) rec.provider_id = it->get<std::string>();
      if (auto it = obj.find(schema.service_column); it != obj.end()) rec.service_id = it->get<std::string>();
      if (auto it = obj.find("logs"); it != obj.end()) {
        if (!it->is_array()) throw Error(ErrorCode::ParseError, line_no, "logs must be an array");
        for (const auto& l : *it) rec.log_lines.push_back(l.get<std::string>());
      }
      if (auto it = obj.find(schema.label_column); it != obj.end() && !it->is_null()) {
        const int v = it->get<int>();
        if (v != 0 && v != 1) throw Error(ErrorCode::ParseError, line_no, "label must be 0 or 1");
        rec.label = v == 1 ? Label::kAnomalous : Label::kNormal;
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, line_no, e.what());
    }
    if (channels == 0) channels = rec.metrics.size();
    validate_record(rec, channels);
    records.push_back(std::move(rec));
  }
  return records;
}

void write_csv(std::ostream& out, const std::vector<TelemetryRecord>& records, const SchemaConfig& schema) {
  const std::size_t m = records.empty() ? schema.metric_columns.size() : records.front().metrics.size();
  std::vector<std::string> names = schema.metric_columns;
  if (names.size() != m) {
    names.clear();
    for (std::size_t i = 0; i < m; ++i) names.push_back("m" + std::to_string(i));
  }
  out << schema.timestamp_column << ',' << schema.provider_column << ',' << schema.service_column;
  for (const auto& n : names) out << ',' << csv_escape(n);
  out << ',' << schema.label_column << ',' << schema.log_column << '\n';
  for (const auto& rec : records) {
    out << rec.timestamp << ',' << csv_escape(rec.provider_id) << ',' << csv_escape(rec.service_id);
    for (double v : rec.metrics) out << ',' << format_double(v);
    out << ',';
    if (rec.label) out << (*rec.label == Label::kAnomalous ? '1' : '0');
    std::string joined;
    for (std::size_t i = 0; i < rec.log_lines.size(); ++i) {
      if (i) joined.push_back(schema.log_separator);
      joined += rec.log_lines[i];
    }
    out << ',' << csv_escape(joined) << '\n';
  }
}

void write_jsonl(std::ostream& out, const std::vector<TelemetryRecord>& records) {
  for (const auto& rec : records) {
    json obj = json::object();
    obj["ts"] = rec.timestamp;
    obj["provider"] = rec.provider_id;
    obj["service"] = rec.service_id;
    obj["metrics"] = rec.metrics;
    obj["logs"] = rec.log_lines;
    if (rec.label) obj["label"] = *rec.label == Label::kAnomalous ? 1 : 0;
    out << obj.dump() << '\n';
  }
}

namespace {
bool is_csv(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".csv";
}
}  // namespace

std::vector<TelemetryRecord> read_file(const std::filesystem::path& path, const SchemaConfig& schema) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return is_csv(path) ? parse_csv(in, schema) : parse_jsonl(in, schema);
}

void write_file(const std::filesystem::path& path, const std::vector<TelemetryRecord>& records,
                const SchemaConfig& schema) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  if (is_csv(path))
    write_csv(out, records, schema);
  else
    write_jsonl(out, records);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

LabeledStream labeled_from_records(std::vector<TelemetryRecord> records) {
  LabeledStream s;
  s.ground_truth.reserve(records.size());
  for (const auto& r : records) s.ground_truth.push_back(r.label && *r.label == Label::kAnomalous);
  s.records = std::move(records);
  return s;
}

// ---------------------------------------------------------------------------
// Synthetic generator

std::string to_string(FaultKind kind) {
  switch (kind) {
    case FaultKind::kSpike: return "spike";
    case FaultKind::kDrift: return "drift";
    case FaultKind::kDropout: return "dropout";
    case FaultKind::kLogBurst: return "log-burst";
  }
  return "unknown";
}

FaultKind fault_kind_from_string(const std::string& name) {
  if (name == "spike") return FaultKind::kSpike;
  if (name == "drift") return FaultKind::kDrift;
  if (name == "dropout") return FaultKind::kDropout;
  if (name == "log-burst") return FaultKind::kLogBurst;
  throw Error(ErrorCode::InvalidScenario, "unknown fault kind '" + name + "'");
}

std::size_t SyntheticScenario::channel_count() const {
  std::size_t n = 0;
  for (const auto& p : providers) n += p.channels.size();
  return n;
}

std::size_t SyntheticScenario::channel_index(const std::string& provider, std::size_t channel) const {
  std::size_t offset = 0;
  for (const auto& p : providers) {
    if (p.name == provider) {
      if (channel >= p.channels.size())
        throw Error(ErrorCode::InvalidScenario, "provider '" + provider + "' has no channel " + std::to_string(channel));
      return offset + channel;
    }
    offset += p.channels.size();
  }
  throw Error(ErrorCode::InvalidScenario, "unknown provider '" + provider + "'");
}

void validate(const SyntheticScenario& sc) {
  if (sc.duration_steps == 0) throw Error(ErrorCode::InvalidScenario, "duration_steps must be >= 1");
  if (sc.providers.empty()) throw Error(ErrorCode::InvalidScenario, "no providers");
  if (sc.diurnal_period_steps == 0) throw Error(ErrorCode::InvalidScenario, "diurnal period must be >= 1");
  for (const auto& p : sc.providers) {
    if (p.channels.empty()) throw Error(ErrorCode::InvalidScenario, "provider '" + p.name + "' has no channels");
    for (const auto& c : p.channels) {
      if (!std::isfinite(c.base) || !std::isfinite(c.diurnal_amplitude) || !(c.noise_std >= 0.0))
        throw Error(ErrorCode::InvalidScenario, "bad channel profile '" + c.name + "'");
    }
  }
  for (const auto& f : sc.faults) {
    if (f.length == 0) throw Error(ErrorCode::InvalidScenario, "fault length must be >= 1");
    if (f.start_step >= sc.duration_steps || f.length > sc.duration_steps - f.start_step)
      throw Error(ErrorCode::InvalidScenario, "fault interval [" + std::to_string(f.start_step) + ", " +
                                                  std::to_string(f.start_step + f.length) +
                                                  ") outside the scenario");
    if (!std::isfinite(f.magnitude)) throw Error(ErrorCode::InvalidScenario, "fault magnitude not finite");
    if (f.kind == FaultKind::kLogBurst) {
      bool found = false;
      for (const auto& p : sc.providers) found = found || p.name == f.provider;
      if (!found) throw Error(ErrorCode::InvalidScenario, "unknown provider '" + f.provider + "'");
    } else {
      (void)sc.channel_index(f.provider, f.channel);
    }
  }
}

namespace {

constexpr std::uint64_t kMetricStream = 1;
constexpr std::uint64_t kLogStream = 2;
constexpr std::uint64_t kBurstStream = 3;

const char* const kInfoTemplates[] = {
    "INFO request {hex} served in {num} ms status 200",
    "INFO heartbeat ok from node {ip}",
    "INFO cache hit ratio {float} for shard {num}",
    "INFO scheduled job {hex} completed in {num} ms",
    "INFO autoscaler holding at {num} replicas",
};
const char* const kWarnTemplates[] = {
    "WARN slow response {num} ms on endpoint {word}",
    "WARN retrying connection to {ip} attempt {num}",
};
const char* const kErrorTemplates[] = {
    "ERROR connection refused by upstream {ip} port {num}",
    "ERROR request {hex} failed with status 503 after {num} ms",
    "FATAL out of memory killing process {num} on node {ip}",
    "ERROR disk write failure on volume {hex} errno {num}",
    "CRITICAL gateway timeout for service {word} trace {hex}",
};
const char* const kWords[] = {"checkout", "search", "auth", "billing", "inventory", "profile"};

std::string render(const char* pattern, Rng& rng) {
  std::string out;
  const std::string_view p(pattern);
  std::size_t i = 0;
  while (i < p.size()) {
    if (p[i] == '{') {
      const auto close = p.find('}', i);
      const std::string_view key = p.substr(i + 1, close - i - 1);
      if (key == "num") {
        out += std::to_string(rng.below(5000));
      } else if (key == "float") {
        const auto cents = rng.below(100);
        out += "0." + std::string(cents < 10 ? "0" : "") + std::to_string(cents);
      } else if (key == "hex") {
        static const char* digits = "0123456789abcdef";
        for (int k = 0; k < 12; ++k) out.push_back(digits[rng.below(16)]);
      } else if (key == "ip") {
        out += "10." + std::to_string(rng.below(256)) + "." + std::to_string(rng.below(256)) + "." +
               std::to_string(rng.below(256));
      } else if (key == "word") {
        out += kWords[rng.below(std::size(kWords))];
      }
      i = close + 1;
    } else {
      out.push_back(p[i++]);
    }
  }
  return out;
}

}  // namespace

double baseline_level(const SyntheticScenario& sc, std::size_t column, std::size_t step) {
  std::size_t offset = 0;
  const std::size_t n_providers = sc.providers.size();
  for (std::size_t pi = 0; pi < n_providers; ++pi) {
    const auto& p = sc.providers[pi];
    if (column < offset + p.channels.size()) {
      const auto& ch = p.channels[column - offset];
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(pi) / static_cast<double>(n_providers);
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(step) /
                               static_cast<double>(sc.diurnal_period_steps) +
                           phase;
      return ch.base + ch.diurnal_amplitude * std::sin(angle);
    }
    offset += p.channels.size();
  }
  throw Error(ErrorCode::InvalidScenario, "column out of range");
}

LabeledStream generate(const SyntheticScenario& sc) {
  validate(sc);
  const Rng root(sc.seed);
  Rng metric_rng = root.fork(kMetricStream);
  Rng log_rng = root.fork(kLogStream);
  Rng burst_rng = root.fork(kBurstStream);

  const std::size_t m = sc.channel_count();
  std::vector<double> noise_std;
  for (const auto& p : sc.providers)
    for (const auto& c : p.channels) noise_std.push_back(c.noise_std);

  std::string provider_id;
  for (const auto& p : sc.providers) provider_id += (provider_id.empty() ? "" : "+") + p.name;

  LabeledStream out;
  out.records.resize(sc.duration_steps);
  out.ground_truth.assign(sc.duration_steps, false);
  for (std::size_t t = 0; t < sc.duration_steps; ++t) {
    auto& rec = out.records[t];
    rec.timestamp = sc.start_timestamp_ms + static_cast<std::int64_t>(t) * sc.step_ms;
    rec.provider_id = provider_id;
    rec.service_id = "multi";
    rec.metrics.resize(m);
    for (std::size_t c = 0; c < m; ++c) {
      rec.metrics[c] = baseline_level(sc, c, t) + noise_std[c] * metric_rng.normal();
    }
    for (const auto& p : sc.providers) {
      const double u_info = log_rng.uniform();
      const double u_warn = log_rng.uniform();
      if (u_info < p.info_log_rate) {
        const auto* tpl = kInfoTemplates[log_rng.below(std::size(kInfoTemplates))];
        rec.log_lines.push_back(p.name + " " + render(tpl, log_rng));
      }
      if (u_warn < p.warn_log_rate) {
        const auto* tpl = kWarnTemplates[log_rng.below(std::size(kWarnTemplates))];
        rec.log_lines.push_back(p.name + " " + render(tpl, log_rng));
      }
    }
  }

  for (const auto& f : sc.faults) {
    for (std::size_t t = f.start_step; t < f.start_step + f.length; ++t) {
      auto& rec = out.records[t];
      out.ground_truth[t] = true;
      switch (f.kind) {
        case FaultKind::kSpike: {
          const std::size_t c = sc.channel_index(f.provider, f.channel);
          rec.metrics[c] += f.magnitude * noise_std[c];
          break;
        }
        case FaultKind::kDrift: {
          const std::size_t c = sc.channel_index(f.provider, f.channel);
          const double ramp = static_cast<double>(t - f.start_step + 1) / static_cast<double>(f.length);
          rec.metrics[c] += f.magnitude * noise_std[c] * ramp;
          break;
        }
        case FaultKind::kDropout: {
          const std::size_t c = sc.channel_index(f.provider, f.channel);
          rec.metrics[c] *= 1.0 - std::clamp(f.magnitude, 0.0, 1.0);
          break;
        }
        case FaultKind::kLogBurst: {
          const long lines = std::max(1L, std::lround(f.magnitude));
          for (long k = 0; k < lines; ++k) {
            const auto* tpl = kErrorTemplates[burst_rng.below(std::size(kErrorTemplates))];
            rec.log_lines.push_back(f.provider + " " + render(tpl, burst_rng));
          }
          break;
        }
      }
    }
  }
  for (std::size_t t = 0; t < sc.duration_steps; ++t) {
    out.records[t].label = out.ground_truth[t] ? Label::kAnomalous : Label::kNormal;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scenario files (JSON)

namespace {

SyntheticScenario scenario_from_json(const json& j) {
  SyntheticScenario sc;
  sc.seed = j.at("seed").get<std::uint64_t>();
  sc.duration_steps = j.at("duration_steps").get<std::size_t>();
  sc.start_timestamp_ms = j.value("start_timestamp_ms", sc.start_timestamp_ms);
  sc.step_ms = j.value("step_ms", sc.step_ms);
  sc.diurnal_period_steps = j.value("diurnal_period_steps", sc.diurnal_period_steps);
  for (const auto& pj : j.at("providers")) {
    ProviderProfile p;
    p.name = pj.at("name").get<std::string>();
    p.service = pj.value("service", p.service);
    p.info_log_rate = pj.value("info_log_rate", p.info_log_rate);
    p.warn_log_rate = pj.value("warn_log_rate", p.warn_log_rate);
    for (const auto& cj : pj.at("channels")) {
      ChannelProfile c;
      c.name = cj.at("name").get<std::string>();
      c.base = cj.at("base").get<double>();
      c.diurnal_amplitude = cj.value("diurnal_amplitude", c.diurnal_amplitude);
      c.noise_std = cj.value("noise_std", c.noise_std);
      p.channels.push_back(std::move(c));
    }
    sc.providers.push_back(std::move(p));
  }
  if (j.contains("faults")) {
    for (const auto& fj : j.at("faults")) {
      FaultSpec f;
      f.start_step = fj.at("start_step").get<std::size_t>();
      f.length = fj.at("length").get<std::size_t>();
      f.kind = fault_kind_from_string(fj.at("kind").get<std::string>());
      f.magnitude = fj.at("magnitude").get<double>();
      f.provider = fj.at("provider").get<std::string>();
      f.channel = fj.value("channel", std::size_t{0});
      sc.faults.push_back(std::move(f));
    }
  }
  return sc;
}

json scenario_to_json(const SyntheticScenario& sc) {
  json j;
  j["seed"] = sc.seed;
  j["duration_steps"] = sc.duration_steps;
  j["start_timestamp_ms"] = sc.start_timestamp_ms;
  j["step_ms"] = sc.step_ms;
  j["diurnal_period_steps"] = sc.diurnal_period_steps;
  j["providers"] = json::array();
  for (const auto& p : sc.providers) {
    json pj;
    pj["name"] = p.name;
    pj["service"] = p.service;
    pj["info_log_rate"] = p.info_log_rate;
    pj["warn_log_rate"] = p.warn_log_rate;
    pj["channels"] = json::array();
    for (const auto& c : p.channels) {
      pj["channels"].push_back({{"name", c.name},
                                {"base", c.base},
                                {"diurnal_amplitude", c.diurnal_amplitude},
                                {"noise_std", c.noise_std}});
    }
    j["providers"].push_back(std::move(pj));
  }
  j["faults"] = json::array();
  for (const auto& f : sc.faults) {
    j["faults"].push_back({{"start_step", f.start_step},
                           {"length", f.length},
                           {"kind", to_string(f.kind)},
                           {"magnitude", f.magnitude},
                           {"provider", f.provider},
                           {"channel", f.channel}});
  }
  return j;
}

}  // namespace

SyntheticScenario scenario_from_json_text(const std::string& text) {
  try {
    auto sc = scenario_from_json(json::parse(text));
    validate(sc);
    return sc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidScenario, e.what());
  }
}

std::string scenario_to_json_text(const SyntheticScenario& scenario) {
  return scenario_to_json(scenario).dump(2);
}

SyntheticScenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open scenario " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json_text(ss.str());
}

std::vector<Interval> intervals_from_flags(const std::vector<bool>& flags) {
  std::vector<Interval> out;
  for (std::size_t i = 0; i < flags.size();) {
    if (!flags[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < flags.size() && flags[j]) ++j;
    out.push_back({i, j});
    i = j;
  }
  return out;
}

}  // namespace mcad::ingest
