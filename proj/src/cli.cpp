// SPDX-License-Identifier: Apache-2.0

#include "mcad/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mcad/checkpoint.hpp"
#include "mcad/error.hpp"
#include "mcad/ingest.hpp"
#include "mcad/pipeline.hpp"

namespace mcad {

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path);
}

PipelineConfig config_or_default(const std::string& path) {
  return path.empty() ? PipelineConfig{} : load_config(path);
}

}  // namespace

int run_cli(int argc, const char* const* argv) { return run_cli(argc, argv, std::cout, std::cerr); }

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-cloud telemetry anomaly detection and early warning", "mcad"};
  app.require_subcommand(1);

  struct {
    std::string scenario, data, train_data, config, out, ckpt, alerts, report;
    std::optional<std::uint64_t> seed;
    bool baseline = false, verbose = false, train = false;
    std::vector<std::size_t> hidden{32, 64, 128};
    std::size_t repeats = 3;
  } opt;

  auto* gen = app.add_subcommand("generate", "Generate a labeled synthetic stream from a scenario");
  gen->add_option("--scenario", opt.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", opt.out, "Output stream (.csv or .jsonl)")->required();
  gen->add_option("--seed", opt.seed, "Override the scenario seed");

  auto* train_cmd = app.add_subcommand("train", "Train a model on a labeled stream");
  train_cmd->add_option("--data", opt.data, "Labeled training stream")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--config", opt.config, "Pipeline config JSON")->check(CLI::ExistingFile);
  train_cmd->add_option("--out", opt.out, "Checkpoint path")->required();
  train_cmd->add_option("--seed", opt.seed, "Training seed (defaults to the config seed)");

  auto* detect_cmd = app.add_subcommand("detect", "Score a stream and write alerts");
  detect_cmd->add_option("--ckpt", opt.ckpt, "Checkpoint")->required()->check(CLI::ExistingFile);
  detect_cmd->add_option("--data", opt.data, "Stream to score")->required()->check(CLI::ExistingFile);
  detect_cmd->add_option("--alerts", opt.alerts, "Alert JSONL file (appended; '-' for standard output)")->required();
  detect_cmd->add_flag("--verbose", opt.verbose, "Also write non-alert decisions");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a labeled stream");
  eval_cmd->add_option("--ckpt", opt.ckpt, "Checkpoint")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--data", opt.data, "Labeled evaluation stream")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--report", opt.report, "Report JSON path")->required();
  eval_cmd->add_flag("--baseline", opt.baseline, "Add the static-threshold baseline");

  auto* sweep_cmd = app.add_subcommand("sweep", "Per-window scoring time across LSTM hidden sizes");
  sweep_cmd->add_option("--data", opt.data, "Stream to score")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--train-data", opt.train_data, "Labeled training stream (with --train)")
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--config", opt.config, "Pipeline config JSON")->check(CLI::ExistingFile);
  sweep_cmd->add_option("--hidden", opt.hidden, "Hidden sizes")->delimiter(',');
  sweep_cmd->add_option("--repeats", opt.repeats, "Timing passes per size (best is kept)");
  sweep_cmd->add_flag("--train", opt.train, "Train each size and record latency and F1");
  sweep_cmd->add_option("--report", opt.report, "Output JSON path (standard output when omitted)");
  sweep_cmd->add_option("--seed", opt.seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      auto scenario = ingest::load_scenario(opt.scenario);
      if (opt.seed) scenario.seed = *opt.seed;
      const auto stream = ingest::generate(scenario);
      ingest::write_file(opt.out, stream.records);
      out << "wrote " << stream.records.size() << " records to " << opt.out << '\n';
    } else if (*train_cmd) {
      const PipelineConfig config = config_or_default(opt.config);
      const auto records = ingest::read_file(opt.data);
      const TrainedModel model = train_pipeline(records, config, opt.seed.value_or(config.seed));
      save_checkpoint(model, opt.out);
      out << "trained " << model.report.epochs << " epochs, final objective " << model.report.final_objective
          << ", checkpoint " << opt.out << '\n';
    } else if (*detect_cmd) {
      const TrainedModel model = load_checkpoint(opt.ckpt);
      const auto records = ingest::read_file(opt.data);
      const Detection det = detect(model, records);
      const bool verbose = opt.verbose || model.config.warning.verbose;
      std::optional<AlertSink> file_sink;
      if (opt.alerts == "-") {
        file_sink.emplace(verbose);
      } else {
        file_sink.emplace(std::filesystem::path(opt.alerts), verbose);
      }
      for (const auto& d : det.decisions) file_sink->emit(d);
      err << det.alert_steps.size() << " alerts over " << det.decisions.size() << " windows\n";
    } else if (*eval_cmd) {
      const TrainedModel model = load_checkpoint(opt.ckpt);
      const auto records = ingest::read_file(opt.data);
      write_text(opt.report, evaluate(model, records, opt.baseline).dump(2) + "\n");
      out << "report written to " << opt.report << '\n';
    } else if (*sweep_cmd) {
      if (opt.train && opt.train_data.empty()) {
        err << "sweep --train requires --train-data\n";
        return kExitUsage;
      }
      const PipelineConfig config = config_or_default(opt.config);
      const auto records = ingest::read_file(opt.data);
      std::vector<TelemetryRecord> train_records;
      if (opt.train) train_records = ingest::read_file(opt.train_data);
      const auto sweep = hidden_size_sweep(train_records, records, config, opt.hidden, opt.train, opt.repeats,
                                           opt.seed.value_or(config.seed));
      const std::string text = to_json(sweep).dump(2) + "\n";
      if (opt.report.empty()) out << text;
      else write_text(opt.report, text);
    }
  } catch (const Error& e) {
    err << "mcad: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "mcad: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace mcad
