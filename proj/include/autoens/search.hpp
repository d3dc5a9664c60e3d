#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "autoens/checkpoint.hpp"
#include "autoens/complexity.hpp"
#include "autoens/dataset.hpp"
#include "autoens/ensemble.hpp"
#include "autoens/error.hpp"
#include "autoens/generators.hpp"
#include "autoens/log.hpp"
#include "autoens/metrics.hpp"
#include "autoens/objective.hpp"
#include "autoens/subnetwork.hpp"

namespace autoens {

// Grouping rule for candidate ensembles: grow pairs the previous best with
// one new subnetwork per candidate; all pools every new subnetwork into a
// single candidate.
enum class StrategyKind { kGrow, kAll };

inline std::string to_string(StrategyKind k) {
  return k == StrategyKind::kGrow ? "grow" : "all";
}

inline StrategyKind strategy_from_string(const std::string& s) {
  if (s == "grow") return StrategyKind::kGrow;
  if (s == "all") return StrategyKind::kAll;
  throw ConfigError("unknown ensemble strategy '" + s + "'");
}

enum class SelectionMetric { kTrainObjective, kEvalLoss };

inline std::string to_string(SelectionMetric m) {
  return m == SelectionMetric::kTrainObjective ? "train_objective" : "eval_loss";
}

inline SelectionMetric selection_metric_from_string(const std::string& s) {
  if (s == "train_objective") return SelectionMetric::kTrainObjective;
  if (s == "eval_loss") return SelectionMetric::kEvalLoss;
  throw ConfigError("unknown selection metric '" + s + "'");
}

enum class EnsemblerKind { kComplexityRegularized, kUniform };

inline std::string to_string(EnsemblerKind k) {
  return k == EnsemblerKind::kComplexityRegularized ? "complexity_regularized"
                                                    : "uniform";
}

inline EnsemblerKind ensembler_from_string(const std::string& s) {
  if (s == "complexity_regularized") return EnsemblerKind::kComplexityRegularized;
  if (s == "uniform") return EnsemblerKind::kUniform;
  throw ConfigError("unknown ensembler '" + s + "'");
}

struct SearchConfig {
  GeneratorConfig generator;
  StrategyKind strategy = StrategyKind::kGrow;
  std::size_t iterations = 4;
  std::size_t steps_per_iteration = 300;
  std::size_t batch_size = 32;
  double learning_rate = 0.1;
  SelectionMetric selection_metric = SelectionMetric::kTrainObjective;
  EnsemblerKind ensembler = EnsemblerKind::kComplexityRegularized;
  ComplexityMeasure measure;
  ObjectiveConfig objective;
  std::uint64_t seed = 42;

  void validate() const {
    if (iterations == 0) throw ConfigError("iterations must be >= 1");
    if (steps_per_iteration == 0) {
      throw ConfigError("steps_per_iteration must be >= 1");
    }
    if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    objective.validate();
    if (measure.kind == MeasureKind::kJacobianNorm &&
        generator.kind == GeneratorKind::kPool) {
      for (Family family : generator.pool_families) {
        if (family == Family::kStumps) {
          throw ConfigError(
              "jacobian_norm cannot be used with a pool that contains stumps: "
              "they are not differentiable");
        }
      }
    }
  }
};

enum class CandidateState { kPending, kTraining, kTrained, kEvaluated };

// Per-candidate evaluation results; everything the metrics CSV reports.
struct CandidateEvaluation {
  double selection_score = std::numeric_limits<double>::infinity();
  double train_objective = 0.0;
  double eval_surrogate_loss = 0.0;
  double train_accuracy = 0.0;
  double eval_accuracy = 0.0;
  double margin_error = 0.0;
  BoundReport bound;
  double weight_l1 = 0.0;
};

// A candidate ensemble: carried-over members (a frozen prefix) plus the new
// subnetworks this iteration contributed.
struct Candidate {
  std::string id;
  std::vector<Subnetwork> subnetworks;
  std::size_t num_carried = 0;
  std::string strategy_tag;
  bool carried_forward = false;  // the previous best, unchanged
  CandidateState state = CandidateState::kPending;
  MixtureWeights weights;
  std::vector<ComplexityReport> reports;
  std::vector<double> fit_trace;
  CandidateEvaluation eval;
  bool failed = false;
  std::string failure;
};

// --- Iteration planning -----------------------------------------------------
// The plan is a pure function of (config, iteration, previous-best metadata),
// which is what lets a resumed process or a remote worker rebuild the same
// structure from a checkpoint.

struct SubnetworkPlanEntry {
  std::string id;
  SubnetworkSpec spec;
};

struct CandidateBlueprint {
  std::string id;
  std::vector<std::string> member_ids;
  std::size_t num_carried = 0;
  bool carried_forward = false;
};

struct IterationPlan {
  std::size_t iteration = 0;
  std::vector<SubnetworkPlanEntry> new_subnetworks;
  std::vector<CandidateBlueprint> candidates;
};

inline IterationPlan build_iteration_plan(
    const SearchConfig& cfg, std::size_t iteration,
    const std::optional<nlohmann::json>& prev_best_subnetworks) {
  IterationPlan plan;
  plan.iteration = iteration;

  const std::vector<SubnetworkSpec> specs =
      generate_candidates(cfg.generator, prev_best_subnetworks, iteration);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    plan.new_subnetworks.push_back({subnetwork_id(iteration, specs[i], i),
                                    specs[i]});
  }

  std::vector<std::string> carried_ids;
  if (prev_best_subnetworks.has_value()) {
    for (const auto& meta : *prev_best_subnetworks) {
      carried_ids.push_back(meta.at("id").get<std::string>());
    }
  }

  std::size_t index = 0;
  auto candidate_id = [&]() {
    return "t" + std::to_string(iteration) + "-cand" + std::to_string(index++);
  };

  // The previous best is always carried forward unchanged as candidate 0, so
  // the selection score can never worsen and exact ties resolve to it.
  if (!carried_ids.empty()) {
    CandidateBlueprint carried;
    carried.id = candidate_id();
    carried.member_ids = carried_ids;
    carried.num_carried = carried_ids.size();
    carried.carried_forward = true;
    plan.candidates.push_back(std::move(carried));
  }

  switch (cfg.strategy) {
    case StrategyKind::kGrow:
      for (const auto& entry : plan.new_subnetworks) {
        CandidateBlueprint bp;
        bp.id = candidate_id();
        bp.member_ids = carried_ids;
        bp.member_ids.push_back(entry.id);
        bp.num_carried = carried_ids.size();
        plan.candidates.push_back(std::move(bp));
      }
      break;
    case StrategyKind::kAll: {
      CandidateBlueprint bp;
      bp.id = candidate_id();
      bp.member_ids = carried_ids;
      for (const auto& entry : plan.new_subnetworks) {
        bp.member_ids.push_back(entry.id);
      }
      bp.num_carried = carried_ids.size();
      plan.candidates.push_back(std::move(bp));
      break;
    }
  }
  return plan;
}

// --- Training ---------------------------------------------------------------

// Ordered by id so every iteration order over the pool is deterministic.
using SubnetworkPool = std::map<std::string, Subnetwork>;

// Advances a subnetwork to the given step count. Batches are a pure function
// of (seed, id, step), so partial progress resumes on the identical sequence.
inline void train_subnetwork_to(Subnetwork& sn, const Dataset& train,
                                const SearchConfig& cfg, std::size_t to_step) {
  while (sn.train_steps_done < to_step) {
    const auto batch = sample_batch(train, cfg.batch_size, cfg.seed, sn.id,
                                    sn.train_steps_done);
    train_step(sn, batch, cfg.learning_rate);
  }
}

// --- Candidate assembly, fitting, evaluation ---------------------------------

inline std::vector<Candidate> assemble_candidates(const IterationPlan& plan,
                                                  const SubnetworkPool& pool,
                                                  StrategyKind strategy) {
  std::vector<Candidate> candidates;
  for (const CandidateBlueprint& bp : plan.candidates) {
    Candidate c;
    c.id = bp.id;
    c.num_carried = bp.num_carried;
    c.carried_forward = bp.carried_forward;
    c.strategy_tag = to_string(strategy);
    for (const std::string& id : bp.member_ids) {
      const auto it = pool.find(id);
      if (it == pool.end()) {
        throw Error("candidate " + bp.id + " references unknown subnetwork " + id);
      }
      c.subnetworks.push_back(it->second);
    }
    c.state = CandidateState::kTrained;
    candidates.push_back(std::move(c));
  }
  return candidates;
}

// Complexity reports plus mixture weights for one candidate. The carried
// forward candidate keeps its previous weights untouched; everything else is
// fitted from the previous weights extended with zeros for new members.
inline void fit_candidate(Candidate& c, const Dataset& train,
                          const SearchConfig& cfg,
                          const std::vector<double>& prev_weights) {
  c.reports.clear();
  for (const Subnetwork& sn : c.subnetworks) {
    c.reports.push_back(make_complexity_report(cfg.measure, sn, train));
  }
  std::vector<double> r;
  for (const auto& report : c.reports) r.push_back(report.value);

  const DenseMatrix logits = ensemble_logits(c.subnetworks, train);
  const std::vector<int> labels = dataset_labels(train);

  if (c.carried_forward) {
    c.weights.values = prev_weights;
    c.fit_trace = {objective(c.weights.values, logits, labels, cfg.objective, r)};
  } else if (cfg.ensembler == EnsemblerKind::kUniform) {
    c.weights = uniform_weights(c.subnetworks.size());
    c.fit_trace = {objective(c.weights.values, logits, labels, cfg.objective, r)};
  } else {
    std::vector<double> w0 = prev_weights;
    w0.resize(c.subnetworks.size(), 0.0);
    FitResult fit = fit_mixture_weights(logits, labels, cfg.objective, r, w0);
    c.weights.values = std::move(fit.weights);
    c.fit_trace = std::move(fit.trace);
  }
}

inline void evaluate_candidate(Candidate& c, const Dataset& train,
                               const Dataset& eval, const SearchConfig& cfg) {
  const DenseMatrix train_logits = ensemble_logits(c.subnetworks, train);
  const std::vector<int> train_labels = dataset_labels(train);
  const DenseMatrix eval_logits = ensemble_logits(c.subnetworks, eval);
  const std::vector<int> eval_labels = dataset_labels(eval);

  std::vector<double> r;
  for (const auto& report : c.reports) r.push_back(report.value);

  CandidateEvaluation& result = c.eval;
  result.train_objective =
      objective(c.weights.values, train_logits, train_labels, cfg.objective, r);
  result.eval_surrogate_loss = smooth_empirical_value(
      eval_logits, eval_labels, c.weights.values, cfg.objective.surrogate);

  const std::vector<double> train_outputs =
      ensemble_outputs(train_logits, c.weights);
  const std::vector<double> eval_outputs =
      ensemble_outputs(eval_logits, c.weights);
  result.train_accuracy = accuracy(train_outputs, train_labels);
  result.eval_accuracy = accuracy(eval_outputs, eval_labels);
  result.margin_error =
      margin_error(train_outputs, train_labels, cfg.objective.rho);
  result.weight_l1 = c.weights.l1_norm();

  EnsembleModel model;
  model.subnetworks = c.subnetworks;
  model.weights = c.weights;
  model.complexity_reports = c.reports;
  result.bound = deepboost_bound(model, train, cfg.objective);

  result.selection_score = cfg.selection_metric == SelectionMetric::kTrainObjective
                               ? result.train_objective
                               : result.eval_surrogate_loss;
  c.state = CandidateState::kEvaluated;
}

// Deterministic ranking: ascending score, ties broken by generation order.
// Failed candidates rank last. Returns candidate indices, best first.
inline std::vector<std::size_t> rank_candidates(
    const std::vector<Candidate>& candidates) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < candidates.size(); ++i) order.push_back(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (candidates[a].failed != candidates[b].failed) {
                       return !candidates[a].failed;
                     }
                     return candidates[a].eval.selection_score <
                            candidates[b].eval.selection_score;
                   });
  return order;
}

inline std::size_t select_best(const std::vector<Candidate>& candidates) {
  const auto order = rank_candidates(candidates);
  if (order.empty() || candidates[order.front()].failed) {
    throw TrainingError("no candidate survived this iteration");
  }
  return order.front();
}

// --- Metrics emission --------------------------------------------------------

// Complexity rows for every distinct subnetwork (first appearance order),
// then one row per candidate. Only ever called by the bookkeeping owner.
inline void emit_iteration_metrics(MetricsWriter& writer, std::size_t iteration,
                                   std::uint64_t global_step,
                                   const std::vector<Candidate>& candidates,
                                   std::size_t best_index) {
  std::vector<std::string> seen;
  for (const Candidate& c : candidates) {
    if (c.failed) continue;
    for (const ComplexityReport& report : c.reports) {
      bool duplicate = false;
      for (const auto& id : seen) {
        if (id == report.subnetwork_id) {
          duplicate = true;
          break;
        }
      }
      if (duplicate) continue;
      seen.push_back(report.subnetwork_id);
      ComplexityCsvRow row;
      row.iteration = iteration;
      row.global_step = global_step;
      row.subnetwork_id = report.subnetwork_id;
      row.measure = report.measure_kind;
      row.value = report.value;
      writer.append(row.to_csv());
    }
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Candidate& c = candidates[i];
    if (c.failed) continue;
    CandidateCsvRow row;
    row.iteration = iteration;
    row.global_step = global_step;
    row.candidate_id = c.id;
    row.objective = c.eval.train_objective;
    row.train_accuracy = c.eval.train_accuracy;
    row.eval_accuracy = c.eval.eval_accuracy;
    row.margin_error = c.eval.margin_error;
    row.bound = c.eval.bound;
    row.weight_l1 = c.eval.weight_l1;
    row.selected = i == best_index;
    writer.append(row.to_csv());
  }
}

// --- Checkpoint construction and state restore -------------------------------

inline constexpr const char* kCheckpointFormat = "autoens-checkpoint-v1";

inline Checkpoint make_boundary_checkpoint(std::size_t completed_iteration,
                                           const Candidate& best,
                                           std::uint64_t global_step,
                                           std::size_t input_dim) {
  Checkpoint c;
  c.iteration_number = completed_iteration + 1;
  c.train_step = global_step;
  nlohmann::json subnetworks = nlohmann::json::array();
  for (const Subnetwork& sn : best.subnetworks) {
    subnetworks.push_back(subnetwork_metadata(sn));
  }
  c.architecture_metadata = {
      {"format", kCheckpointFormat},
      {"iteration", c.iteration_number},
      {"input_dim", input_dim},
      {"best",
       {{"candidate_id", best.id},
        {"strategy_tag", best.strategy_tag},
        {"subnetworks", subnetworks}}},
  };
  for (const Subnetwork& sn : best.subnetworks) {
    c.subnetwork_states.push_back(
        {sn.id, flatten_params(sn), sn.train_steps_done});
  }
  c.mixture_weights = best.weights.values;
  return c;
}

// Loop state entering iteration `iteration_number`.
struct IterationState {
  std::size_t iteration_number = 0;
  std::optional<EnsembleModel> best;             // f* of the previous iteration
  std::optional<nlohmann::json> best_metadata;   // its subnetwork metadata array
  std::string best_candidate_id;
  std::uint64_t global_step = 0;
  std::vector<Candidate> candidates;             // filled while iterating
};

// Rebuild-from-metadata plus restore-from-parameters: the warm-start path.
// Every iteration transition goes through here, not just crash recovery.
inline IterationState restore_state_from_checkpoint(const Checkpoint& ckpt,
                                                    std::uint64_t seed) {
  const auto& meta = ckpt.architecture_metadata;
  if (!meta.contains("format") || meta.at("format") != kCheckpointFormat) {
    throw CheckpointError("unrecognized checkpoint format");
  }
  IterationState state;
  state.iteration_number = meta.at("iteration").get<std::size_t>();
  if (state.iteration_number != ckpt.iteration_number) {
    throw CheckpointError("metadata iteration disagrees with checkpoint name");
  }
  const std::size_t input_dim = meta.at("input_dim").get<std::size_t>();
  const auto& best_meta = meta.at("best");
  state.best_candidate_id = best_meta.at("candidate_id").get<std::string>();
  state.best_metadata = best_meta.at("subnetworks");

  EnsembleModel best;
  const auto& subnetworks_meta = *state.best_metadata;
  if (subnetworks_meta.size() != ckpt.subnetwork_states.size()) {
    throw CheckpointError("metadata lists " +
                          std::to_string(subnetworks_meta.size()) +
                          " subnetworks, blob has " +
                          std::to_string(ckpt.subnetwork_states.size()));
  }
  for (std::size_t k = 0; k < subnetworks_meta.size(); ++k) {
    Subnetwork sn = subnetwork_from_metadata(subnetworks_meta[k], input_dim, seed);
    const SubnetworkState& stored = ckpt.subnetwork_states[k];
    if (stored.id != sn.id) {
      throw CheckpointError("blob order mismatch: " + stored.id + " vs " + sn.id);
    }
    unflatten_params(sn, stored.flat_params);
    sn.train_steps_done = stored.steps_done;
    best.subnetworks.push_back(std::move(sn));
  }
  best.weights.values = ckpt.mixture_weights;
  state.best = std::move(best);
  state.global_step = ckpt.train_step;
  return state;
}

// --- The iteration loop -------------------------------------------------------

struct SearchHooks {
  std::function<void(std::size_t iteration)> on_iteration_start;
  // After evaluation, before the t+1 checkpoint is committed.
  std::function<void(std::size_t iteration, const EnsembleModel& best)>
      on_best_selected;
  // After the t+1 state has been rebuilt from the committed checkpoint.
  std::function<void(std::size_t next_iteration, const EnsembleModel& restored)>
      on_state_restored;
};

struct IterationSummary {
  std::size_t iteration = 0;
  std::string best_candidate_id;
  double best_score = 0.0;
  CandidateEvaluation best_eval;
  std::vector<double> scores;  // in candidate order, failed = +inf
  std::size_t num_candidates = 0;
};

// Runs iteration t from `state`: train, fit, evaluate, then the bookkeeping
// transition (metrics rows, checkpoint t+1, rebuild + warm-start). Returns
// the state for t+1 along with the iteration summary.
inline std::pair<IterationState, IterationSummary> run_iteration(
    IterationState state, const Dataset& train, const Dataset& eval,
    const SearchConfig& cfg, const std::filesystem::path& checkpoint_dir,
    MetricsWriter* metrics, RunLog* log, const SearchHooks* hooks = nullptr) {
  const std::size_t t = state.iteration_number;
  if (hooks != nullptr && hooks->on_iteration_start) hooks->on_iteration_start(t);
  if (log != nullptr) {
    log->record({{"event", "iteration_start"}, {"iteration", t}});
  }

  const IterationPlan plan = build_iteration_plan(cfg, t, state.best_metadata);

  SubnetworkPool pool;
  if (state.best.has_value()) {
    for (const Subnetwork& sn : state.best->subnetworks) pool.emplace(sn.id, sn);
  }
  for (const SubnetworkPlanEntry& entry : plan.new_subnetworks) {
    Subnetwork sn =
        make_subnetwork(entry.spec, entry.id, train.dimension(), cfg.seed);
    try {
      train_subnetwork_to(sn, train, cfg, cfg.steps_per_iteration);
    } catch (const TrainingError& err) {
      if (log != nullptr) {
        log->record({{"event", "subnetwork_diverged"},
                     {"iteration", t},
                     {"subnetwork", entry.id},
                     {"error", err.what()}});
      }
      continue;
    }
    pool.emplace(sn.id, std::move(sn));
  }

  std::vector<Candidate> candidates;
  const std::vector<double> prev_weights =
      state.best.has_value() ? state.best->weights.values : std::vector<double>{};
  for (const CandidateBlueprint& bp : plan.candidates) {
    bool members_available = true;
    for (const std::string& id : bp.member_ids) {
      if (pool.find(id) == pool.end()) members_available = false;
    }
    Candidate c;
    if (!members_available) {
      c.id = bp.id;
      c.carried_forward = bp.carried_forward;
      c.strategy_tag = to_string(cfg.strategy);
      c.failed = true;
      c.failure = "member subnetwork diverged during training";
      candidates.push_back(std::move(c));
      continue;
    }
    const IterationPlan single{plan.iteration, {}, {bp}};
    c = assemble_candidates(single, pool, cfg.strategy).front();
    try {
      fit_candidate(c, train, cfg, prev_weights);
      evaluate_candidate(c, train, eval, cfg);
    } catch (const Error& err) {
      c.failed = true;
      c.failure = err.what();
      if (log != nullptr) {
        log->record({{"event", "candidate_failed"},
                     {"iteration", t},
                     {"candidate", c.id},
                     {"error", err.what()}});
      }
    }
    candidates.push_back(std::move(c));
  }
  state.candidates = std::move(candidates);

  const std::size_t best_index = select_best(state.candidates);
  const Candidate& best = state.candidates[best_index];
  if (log != nullptr) {
    log->record({{"event", "iteration_evaluated"},
                 {"iteration", t},
                 {"best_candidate", best.id},
                 {"selection_score", best.eval.selection_score}});
  }

  IterationSummary summary;
  summary.iteration = t;
  summary.best_candidate_id = best.id;
  summary.best_score = best.eval.selection_score;
  summary.best_eval = best.eval;
  summary.num_candidates = state.candidates.size();
  for (const Candidate& c : state.candidates) {
    summary.scores.push_back(c.failed
                                 ? std::numeric_limits<double>::infinity()
                                 : c.eval.selection_score);
  }

  if (hooks != nullptr && hooks->on_best_selected) {
    EnsembleModel model;
    model.subnetworks = best.subnetworks;
    model.weights = best.weights;
    model.complexity_reports = best.reports;
    model.objective_value = best.eval.train_objective;
    hooks->on_best_selected(t, model);
  }

  // Bookkeeping: metrics rows, the committed t+1 checkpoint, and the rebuilt
  // warm-started state for the next iteration.
  if (metrics != nullptr) {
    emit_iteration_metrics(*metrics, t, state.global_step +
                                            cfg.steps_per_iteration,
                           state.candidates, best_index);
  }
  const std::uint64_t next_global_step =
      state.global_step + cfg.steps_per_iteration;
  const Checkpoint ckpt =
      make_boundary_checkpoint(t, best, next_global_step, train.dimension());
  save_checkpoint(ckpt, checkpoint_dir);
  if (log != nullptr) {
    log->record({{"event", "bookkeeping_commit"},
                 {"iteration", t},
                 {"next_iteration", t + 1},
                 {"global_step", next_global_step}});
  }

  IterationState next = restore_state_from_checkpoint(
      load_checkpoint(checkpoint_dir), cfg.seed);
  if (hooks != nullptr && hooks->on_state_restored) {
    hooks->on_state_restored(next.iteration_number, *next.best);
  }
  return {std::move(next), std::move(summary)};
}

struct SearchResult {
  EnsembleModel best;
  std::string best_candidate_id;
  std::vector<IterationSummary> summaries;  // iterations run in this process
  std::size_t start_iteration = 0;          // 0 unless resumed
};

// Full search run with resume: picks up from the newest valid checkpoint in
// out_dir/checkpoints when one exists, otherwise starts at iteration 0.
inline SearchResult run_search(const SearchConfig& cfg, const Dataset& train,
                               const Dataset& eval,
                               const std::filesystem::path& out_dir,
                               RunLog* log = nullptr,
                               const SearchHooks* hooks = nullptr) {
  cfg.validate();
  train.validate();
  eval.validate();
  if (train.dimension() != eval.dimension()) {
    throw ShapeError("train dimension " + std::to_string(train.dimension()) +
                     " != eval dimension " + std::to_string(eval.dimension()));
  }

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path checkpoint_dir = out_dir / "checkpoints";

  IterationState state;
  if (auto ckpt = try_load_checkpoint(checkpoint_dir); ckpt.has_value()) {
    state = restore_state_from_checkpoint(*ckpt, cfg.seed);
    if (log != nullptr) {
      log->record({{"event", "resume"},
                   {"iteration", state.iteration_number}});
    }
  }

  if (train.single_class() && log != nullptr) {
    log->record({{"event", "warning"},
                 {"message", "training dataset contains a single class"}});
  }

  MetricsWriter metrics;
  metrics.open(out_dir / "metrics.csv", state.iteration_number);

  SearchResult result;
  result.start_iteration = state.iteration_number;
  while (state.iteration_number < cfg.iterations) {
    auto [next, summary] = run_iteration(std::move(state), train, eval, cfg,
                                         checkpoint_dir, &metrics, log, hooks);
    result.summaries.push_back(std::move(summary));
    state = std::move(next);
  }

  if (!state.best.has_value()) {
    throw CheckpointError("search finished without a selected ensemble");
  }
  result.best = *state.best;
  result.best_candidate_id = state.best_candidate_id;
  return result;
}

}  // namespace autoens
