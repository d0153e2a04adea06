// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "mcad/cli.hpp"
#include "mcad/ingest.hpp"

using namespace mcad;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mcad");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("mcad_cli_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

void write_small_inputs(const TempDir& dir) {
  ingest::SyntheticScenario s;
  s.seed = 11;
  s.duration_steps = 300;
  ingest::ProviderProfile p;
  p.name = "aws";
  p.channels = {{"cpu", 0.5, 0.05, 0.02}, {"mem", 0.6, 0.05, 0.02}};
  s.providers = {p};
  for (std::size_t i = 0; i < 5; ++i)
    s.faults.push_back({30 + i * 55, 4, i % 2 ? ingest::FaultKind::kLogBurst : ingest::FaultKind::kSpike,
                        i % 2 ? 4.0 : 10.0, "aws", 0});
  std::ofstream(dir / "scenario.json") << ingest::scenario_to_json_text(s);
  std::ofstream(dir / "config.json") << R"({
    "extractor": {"branch_channels": 4, "cnn_dim": 8, "lstm_hidden": 6, "context_dim": 8,
                  "attn_dk": 8, "attn_dv": 12},
    "logsem": {"context_dim": 8, "embed_dim": 16},
    "detector": {"epochs": 2},
    "data": {"train_stride": 3}
  })";
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
  auto r = cli({"train", "--bogus"});
  CHECK(r.code == kExitUsage);
  CHECK_FALSE(r.err.empty());
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"eval", "--ckpt", "/nonexistent/ckpt.json"}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("the installed binary reports usage errors") {
  const std::string cmd = std::string(MCAD_CLI_PATH) + " generate --unknown-flag > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == kExitUsage);
}

TEST_CASE("generate, train, detect and eval") {
  TempDir dir;
  write_small_inputs(dir);
  REQUIRE(cli({"generate", "--scenario", dir / "scenario.json", "--out", dir / "train.csv"}).code == kExitOk);
  REQUIRE(cli({"generate", "--scenario", dir / "scenario.json", "--out", dir / "eval.jsonl", "--seed", "3"}).code ==
          kExitOk);
  CHECK(slurp(dir / "train.csv") != "");
  REQUIRE(cli({"train", "--data", dir / "train.csv", "--config", dir / "config.json", "--out", dir / "m.json",
               "--seed", "5"})
              .code == kExitOk);

  auto r = cli({"detect", "--ckpt", dir / "m.json", "--data", dir / "eval.jsonl", "--alerts", dir / "a.jsonl",
                "--verbose"});
  REQUIRE(r.code == kExitOk);
  std::istringstream lines(slurp(dir / "a.jsonl"));
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("posterior"));
    ++n;
  }
  CHECK(n == 300 - 10 + 1);

  REQUIRE(cli({"eval", "--ckpt", dir / "m.json", "--data", dir / "eval.jsonl", "--report", dir / "r.json"}).code ==
          kExitOk);
  const auto plain = nlohmann::json::parse(slurp(dir / "r.json"));
  CHECK(plain.contains("hybrid"));
  CHECK_FALSE(plain.contains("baseline"));
  CHECK(plain["seed"] == 5);

  REQUIRE(cli({"eval", "--ckpt", dir / "m.json", "--data", dir / "eval.jsonl", "--report", dir / "rb.json",
               "--baseline"})
              .code == kExitOk);
  const auto with = nlohmann::json::parse(slurp(dir / "rb.json"));
  CHECK(with.contains("baseline"));
  CHECK(with["baseline"].contains("metrics"));
  CHECK(with["hybrid"] == plain["hybrid"]);

  r = cli({"sweep", "--data", dir / "eval.jsonl", "--config", dir / "config.json", "--hidden", "2,4", "--repeats",
           "1"});
  REQUIRE(r.code == kExitOk);
  CHECK(nlohmann::json::parse(r.out).size() == 2);
}

TEST_CASE("runtime failures exit with 2") {
  TempDir dir;
  std::ofstream(dir / "bad.csv") << "ts,cpu\n1,notanumber\n";
  auto r = cli({"train", "--data", dir / "bad.csv", "--out", dir / "m.json"});
  CHECK(r.code == kExitRuntime);
  CHECK(r.err.find("line 2") != std::string::npos);

  std::ofstream(dir / "ckpt.json") << R"({"format_version": 999})";
  std::ofstream(dir / "ok.csv") << "ts,cpu\n1,0.5\n";
  r = cli({"detect", "--ckpt", dir / "ckpt.json", "--data", dir / "ok.csv", "--alerts", "-"});
  CHECK(r.code == kExitRuntime);
}

TEST_CASE("the bundled scenario generates") {
  TempDir dir;
  REQUIRE(cli({"generate", "--scenario", MCAD_DATA_DIR "/scenario.json", "--out", dir / "s.csv"}).code == kExitOk);
  std::ifstream in(dir / "s.csv");
  std::size_t lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  CHECK(lines == 5001);
}
