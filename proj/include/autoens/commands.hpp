#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "autoens/cluster.hpp"
#include "autoens/config.hpp"
#include "autoens/csv.hpp"
#include "autoens/log.hpp"
#include "autoens/metrics.hpp"
#include "autoens/model_io.hpp"
#include "autoens/search.hpp"

namespace autoens {

struct TrainOutcome {
  std::filesystem::path metrics_path;
  std::filesystem::path export_dir;
  EnsembleModel best;
  std::string best_candidate_id;
  std::vector<IterationSummary> summaries;
};

// Runs the full search (local or simulated cluster), writes checkpoints and
// metrics as it goes, and exports the selected ensemble at the end.
inline TrainOutcome run_train(const RunConfig& cfg,
                              const SearchHooks* hooks = nullptr,
                              std::ostream* out = nullptr) {
  cfg.validate();
  const Dataset train = load_csv(cfg.train_data, cfg.label_column,
                                 SplitTag::kTrain);
  const Dataset eval = load_csv(cfg.eval_data, cfg.label_column,
                                SplitTag::kEval);

  std::filesystem::create_directories(cfg.output_dir);
  {
    std::ofstream config_out(cfg.output_dir / "config.json", std::ios::trunc);
    config_out << cfg.to_json().dump(2) << '\n';
  }
  RunLog log(cfg.output_dir / "run.log");

  const auto started = std::chrono::steady_clock::now();
  TrainOutcome outcome;
  if (cfg.cluster.num_workers > 1) {
    ClusterResult result = run_cluster(cfg.search, cfg.cluster, train, eval,
                                       cfg.output_dir, &log);
    outcome.best = std::move(result.best);
    outcome.best_candidate_id = result.best_candidate_id;
    outcome.summaries = std::move(result.summaries);
  } else {
    SearchResult result =
        run_search(cfg.search, train, eval, cfg.output_dir, &log, hooks);
    outcome.best = std::move(result.best);
    outcome.best_candidate_id = result.best_candidate_id;
    outcome.summaries = std::move(result.summaries);
  }
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - started);
  log.record({{"event", "run_complete"},
              {"wall_time_ms", elapsed.count()},
              {"iterations", cfg.search.iterations}});

  ExportedModel model;
  model.input_dim = train.dimension();
  model.feature_names = train.feature_names;
  model.label_column = cfg.label_column;
  model.rho = cfg.search.objective.rho;
  model.ensemble = outcome.best;
  outcome.export_dir = cfg.output_dir / "export";
  save_model(model, outcome.export_dir);
  outcome.metrics_path = cfg.output_dir / "metrics.csv";

  if (out != nullptr) {
    *out << "selected " << outcome.best_candidate_id << " with "
         << outcome.best.subnetworks.size() << " subnetworks ("
         << elapsed.count() << " ms)\n"
         << "metrics: " << outcome.metrics_path.string() << '\n'
         << "export:  " << (outcome.export_dir / "model.json").string() << '\n';
  }
  return outcome;
}

struct EvaluationOutcome {
  double accuracy = 0.0;
  double margin_error = 0.0;
  double rho = 0.0;
  std::size_t num_examples = 0;
  std::vector<std::pair<std::string, double>> weight_by_subnetwork;
};

inline EvaluationOutcome run_evaluate(const std::filesystem::path& model_dir,
                                      const std::filesystem::path& data_csv,
                                      std::ostream* out = nullptr,
                                      std::optional<std::filesystem::path>
                                          csv_out = std::nullopt) {
  const ExportedModel model = load_model(model_dir);
  const Dataset raw = load_csv(data_csv, model.label_column, SplitTag::kEval);
  const std::vector<std::size_t> mapping =
      align_feature_schema(model, raw.feature_names);

  std::vector<double> outputs;
  std::vector<int> labels;
  outputs.reserve(raw.examples.size());
  for (const Example& e : raw.examples) {
    outputs.push_back(
        predict_ensemble(model.ensemble, reorder_features(e.features, mapping)));
    labels.push_back(e.label);
  }

  EvaluationOutcome result;
  result.accuracy = accuracy(outputs, labels);
  result.margin_error = margin_error(outputs, labels, model.rho);
  result.rho = model.rho;
  result.num_examples = raw.examples.size();
  for (std::size_t k = 0; k < model.ensemble.subnetworks.size(); ++k) {
    result.weight_by_subnetwork.emplace_back(
        model.ensemble.subnetworks[k].id,
        std::abs(model.ensemble.weights.values[k]));
  }

  std::ostringstream text;
  text << "examples," << result.num_examples << '\n'
       << "accuracy," << format_double(result.accuracy) << '\n'
       << "margin_error_at_rho_" << format_double(result.rho) << ','
       << format_double(result.margin_error) << '\n';
  for (const auto& [id, weight] : result.weight_by_subnetwork) {
    text << "abs_weight," << id << ',' << format_double(weight) << '\n';
  }
  if (out != nullptr) *out << text.str();
  const std::filesystem::path csv_path =
      csv_out.value_or((std::filesystem::is_directory(model_dir)
                            ? model_dir
                            : model_dir.parent_path()) /
                       "evaluation.csv");
  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) throw DataError("cannot write " + csv_path.string());
  csv << text.str();
  return result;
}

struct ReportRow {
  std::size_t iteration = 0;
  std::uint64_t global_step = 0;
  std::size_t num_candidates = 0;
  std::string best_candidate;
  double best_objective = 0.0;
  double train_accuracy = 0.0;
  double eval_accuracy = 0.0;
  double margin_error = 0.0;
  double bound_total = 0.0;
  double weight_l1 = 0.0;
};

// Aggregates metrics.csv into a per-iteration summary plus an accuracy-per-
// train-step series for external plotting. Deterministic and idempotent.
inline std::vector<ReportRow> run_report(const std::filesystem::path& run_dir,
                                         std::ostream* out = nullptr) {
  const std::filesystem::path metrics_path = run_dir / "metrics.csv";
  std::ifstream in(metrics_path);
  if (!in) throw DataError("no metrics.csv in " + run_dir.string());

  std::map<std::size_t, ReportRow> rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream cells_in(line);
    while (std::getline(cells_in, cell, ',')) cells.push_back(cell);
    cells.resize(16);
    if (cells[0] != "candidate") continue;
    const std::size_t iteration = std::stoull(cells[1]);
    ReportRow& row = rows[iteration];
    row.iteration = iteration;
    row.global_step = std::stoull(cells[2]);
    ++row.num_candidates;
    if (cells[15] == "1") {
      row.best_candidate = cells[3];
      row.best_objective = std::stod(cells[6]);
      row.train_accuracy = std::stod(cells[7]);
      row.eval_accuracy = std::stod(cells[8]);
      row.margin_error = std::stod(cells[9]);
      row.bound_total = std::stod(cells[13]);
      row.weight_l1 = std::stod(cells[14]);
    }
  }
  if (rows.empty()) {
    throw DataError("metrics.csv in " + run_dir.string() +
                    " has no candidate rows");
  }

  std::ostringstream summary;
  summary << "iteration,global_step,candidates,best_candidate,best_objective,"
             "train_accuracy,eval_accuracy,margin_error,bound_total,weight_l1\n";
  std::ostringstream series;
  series << "global_step,train_accuracy,eval_accuracy\n";
  std::vector<ReportRow> result;
  for (const auto& [iteration, row] : rows) {
    summary << row.iteration << ',' << row.global_step << ','
            << row.num_candidates << ',' << row.best_candidate << ','
            << format_double(row.best_objective) << ','
            << format_double(row.train_accuracy) << ','
            << format_double(row.eval_accuracy) << ','
            << format_double(row.margin_error) << ','
            << format_double(row.bound_total) << ','
            << format_double(row.weight_l1) << '\n';
    series << row.global_step << ',' << format_double(row.train_accuracy)
           << ',' << format_double(row.eval_accuracy) << '\n';
    result.push_back(row);
  }

  std::ofstream summary_out(run_dir / "report.csv", std::ios::trunc);
  summary_out << summary.str();
  std::ofstream series_out(run_dir / "accuracy_per_step.csv", std::ios::trunc);
  series_out << series.str();
  if (out != nullptr) *out << summary.str();
  return result;
}

}  // namespace autoens
