// autoens command-line tool: train, evaluate, and report on automatically
// learned ensembles of small models.
//
// Exit codes: 0 success, 2 configuration or usage errors, 1 anything else.

#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "autoens/commands.hpp"

namespace {

int verbosity_from_env() {
  const char* level = std::getenv("AUTOENS_LOG");
  if (level == nullptr) return 1;
  const std::string value(level);
  if (value == "quiet" || value == "0") return 0;
  if (value == "debug" || value == "2") return 2;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"automatic ensemble search over small models"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* train = app.add_subcommand("train", "run the ensemble search");
  train->add_option("--config", config_path, "run configuration JSON")
      ->required();

  std::string model_path;
  std::string data_path;
  std::string eval_out;
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "evaluate an exported model on a CSV");
  evaluate->add_option("--model", model_path, "exported model directory")
      ->required();
  evaluate->add_option("--data", data_path, "dataset CSV")->required();
  evaluate->add_option("--out", eval_out, "metrics CSV output path");

  std::string run_dir;
  CLI::App* report =
      app.add_subcommand("report", "summarize a finished run's metrics");
  report->add_option("--run", run_dir, "run output directory")->required();

  CLI11_PARSE(app, argc, argv);
  const int verbosity = verbosity_from_env();
  std::ostream* out = verbosity > 0 ? &std::cout : nullptr;

  try {
    if (train->parsed()) {
      const autoens::RunConfig cfg = autoens::load_run_config(config_path);
      autoens::run_train(cfg, nullptr, out);
    } else if (evaluate->parsed()) {
      std::optional<std::filesystem::path> csv_out;
      if (!eval_out.empty()) csv_out = eval_out;
      autoens::run_evaluate(model_path, data_path, &std::cout, csv_out);
    } else if (report->parsed()) {
      autoens::run_report(run_dir, &std::cout);
    }
  } catch (const autoens::ConfigError& err) {
    std::cerr << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << err.what() << '\n';
    return 1;
  }
  return 0;
}
