#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "autoens/checkpoint.hpp"
#include "autoens/dataset.hpp"
#include "autoens/search.hpp"

using namespace autoens;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("autoens-search-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

SearchConfig small_config() {
  SearchConfig cfg;
  cfg.generator.kind = GeneratorKind::kGrow;
  cfg.generator.mlp_width = 4;
  cfg.iterations = 3;
  cfg.steps_per_iteration = 60;
  cfg.batch_size = 16;
  cfg.learning_rate = 0.2;
  cfg.objective.lambda = 1e-3;
  cfg.objective.beta = 1e-4;
  cfg.objective.rho = 0.1;
  cfg.objective.max_prox_steps = 200;
  cfg.objective.tol = 1e-10;
  cfg.seed = 42;
  return cfg;
}

std::vector<std::string> architecture_ids(const EnsembleModel& model) {
  std::vector<std::string> ids;
  for (const Subnetwork& sn : model.subnetworks) ids.push_back(sn.id);
  return ids;
}

}  // namespace

TEST_CASE("evaluator ranking picks the lowest score with index tie-break") {
  std::vector<Candidate> candidates(3);
  for (std::size_t i = 0; i < 3; ++i) {
    candidates[i].id = "t0-cand" + std::to_string(i);
  }
  candidates[0].eval.selection_score = 0.5;
  candidates[1].eval.selection_score = 0.3;
  candidates[2].eval.selection_score = 0.9;
  REQUIRE(select_best(candidates) == 1);
  REQUIRE(rank_candidates(candidates) == std::vector<std::size_t>{1, 0, 2});

  candidates[0].eval.selection_score = 0.3;
  candidates[2].eval.selection_score = 0.3;
  REQUIRE(select_best(candidates) == 0);

  // Failed candidates rank last even with a better stored score.
  candidates[1].failed = true;
  REQUIRE(rank_candidates(candidates).back() == 1);
}

TEST_CASE("ranking is invariant under candidate permutation given ids") {
  Rng rng(2);
  std::vector<Candidate> candidates(5);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    candidates[i].id = "c" + std::to_string(i);
    candidates[i].eval.selection_score = rng.uniform();
  }
  auto ranked_ids = [&](const std::vector<Candidate>& list) {
    std::vector<std::string> ids;
    for (std::size_t idx : rank_candidates(list)) ids.push_back(list[idx].id);
    return ids;
  };
  const auto baseline = ranked_ids(candidates);
  std::vector<Candidate> shuffled = candidates;
  std::rotate(shuffled.begin(), shuffled.begin() + 2, shuffled.end());
  REQUIRE(ranked_ids(shuffled) == baseline);
}

TEST_CASE("iteration 0 with a linear-only pool selects the single candidate") {
  TempDir dir;
  const Dataset train = make_two_gaussians(200, 2, 7, SplitTag::kTrain, 4.0);
  const Dataset eval = make_two_gaussians(100, 2, 8, SplitTag::kEval, 4.0);
  SearchConfig cfg = small_config();
  cfg.generator.kind = GeneratorKind::kPool;
  cfg.generator.pool_families = {Family::kLinear};
  cfg.iterations = 1;
  const SearchResult result = run_search(cfg, train, eval, dir.path);
  REQUIRE(result.summaries.size() == 1);
  REQUIRE(result.summaries[0].num_candidates == 1);
  REQUIRE(result.best.subnetworks.size() == 1);
  REQUIRE(result.best.subnetworks[0].spec.family == Family::kLinear);
}

TEST_CASE("a worse new candidate loses to the carried-forward best") {
  TempDir dir;
  const Dataset train = make_two_gaussians(120, 2, 31, SplitTag::kTrain, 6.0);
  const Dataset eval = make_two_gaussians(60, 2, 32, SplitTag::kEval, 6.0);

  // Hand-built previous best: a well-trained linear model, weight 1.
  SubnetworkSpec spec;
  Subnetwork lin = make_subnetwork(spec, "t0-linear-0", 2, 42);
  SearchConfig cfg = small_config();
  cfg.steps_per_iteration = 1;  // new candidates stay nearly untrained
  cfg.objective.lambda = 0.0;
  cfg.objective.beta = 0.0;
  cfg.ensembler = EnsemblerKind::kUniform;
  for (std::size_t step = 0; step < 800; ++step) {
    train_step(lin, sample_batch(train, 16, 42, lin.id, step), 0.5);
  }

  IterationState state;
  state.iteration_number = 1;
  state.global_step = 800;
  EnsembleModel best;
  best.subnetworks.push_back(lin);
  best.weights.values = {1.0};
  nlohmann::json best_meta = nlohmann::json::array();
  best_meta.push_back(subnetwork_metadata(lin));
  state.best = best;
  state.best_metadata = best_meta;

  // Expected carried score: F(w) recomputed on the same inputs.
  Candidate probe;
  probe.subnetworks = {lin};
  probe.weights.values = {1.0};
  probe.carried_forward = true;
  fit_candidate(probe, train, cfg, {1.0});
  evaluate_candidate(probe, train, eval, cfg);
  const double carried_score = probe.eval.selection_score;

  auto [next, summary] =
      run_iteration(std::move(state), train, eval, cfg, dir.path / "ckpt",
                    nullptr, nullptr);
  REQUIRE(summary.best_candidate_id == "t1-cand0");  // the carried candidate
  REQUIRE(summary.best_score == carried_score);      // unchanged, bit-exact
  REQUIRE(next.iteration_number == 2);
  REQUIRE(architecture_ids(*next.best) == std::vector<std::string>{lin.id});
}

TEST_CASE("selection scores are non-increasing over a full run") {
  TempDir dir;
  const Dataset train = make_two_gaussians(400, 2, 5);
  const Dataset eval = make_two_gaussians(200, 2, 6);
  SearchConfig cfg = small_config();
  cfg.iterations = 3;
  const SearchResult result = run_search(cfg, train, eval, dir.path);
  REQUIRE(result.summaries.size() == 3);
  for (std::size_t t = 1; t < result.summaries.size(); ++t) {
    REQUIRE(result.summaries[t].best_score <=
            result.summaries[t - 1].best_score + 1e-12);
  }
  // One committed checkpoint per transition.
  const auto names = list_checkpoints(dir.path / "checkpoints");
  REQUIRE(names.size() == 3);
  REQUIRE(names.front().iteration == 3);
}

TEST_CASE("bookkeeping increments the iteration number by one") {
  TempDir dir;
  const Dataset train = make_two_gaussians(100, 2, 11);
  const Dataset eval = make_two_gaussians(50, 2, 12);
  SearchConfig cfg = small_config();
  cfg.iterations = 4;
  std::vector<std::size_t> restored_iterations;
  SearchHooks hooks;
  hooks.on_state_restored = [&](std::size_t next, const EnsembleModel&) {
    restored_iterations.push_back(next);
  };
  run_search(cfg, train, eval, dir.path, nullptr, &hooks);
  REQUIRE(restored_iterations == std::vector<std::size_t>{1, 2, 3, 4});
}

TEST_CASE("warm start: restored best predicts identically on a probe batch") {
  TempDir dir;
  const Dataset train = make_two_gaussians(300, 2, 15);
  const Dataset eval = make_two_gaussians(150, 2, 16);
  const Dataset probe = make_two_gaussians(32, 2, 99);
  SearchConfig cfg = small_config();

  std::map<std::size_t, std::vector<double>> pre_transition;
  double max_diff = 0.0;
  SearchHooks hooks;
  hooks.on_best_selected = [&](std::size_t t, const EnsembleModel& best) {
    std::vector<double> logits;
    for (const Example& e : probe.examples) {
      logits.push_back(predict_ensemble(best, e.features));
    }
    pre_transition[t] = logits;
  };
  hooks.on_state_restored = [&](std::size_t next, const EnsembleModel& restored) {
    const auto& before = pre_transition.at(next - 1);
    for (std::size_t i = 0; i < probe.examples.size(); ++i) {
      const double after = predict_ensemble(restored, probe.examples[i].features);
      max_diff = std::max(max_diff, std::abs(after - before[i]));
    }
  };
  run_search(cfg, train, eval, dir.path, nullptr, &hooks);
  REQUIRE(max_diff <= 1e-12);
}

TEST_CASE("rebuilding from metadata reproduces the candidate structure") {
  TempDir dir;
  const Dataset train = make_two_gaussians(100, 2, 21);
  const Dataset eval = make_two_gaussians(50, 2, 22);
  SearchConfig cfg = small_config();
  cfg.iterations = 2;
  run_search(cfg, train, eval, dir.path);

  const Checkpoint ckpt = load_checkpoint(dir.path / "checkpoints");
  const IterationState a = restore_state_from_checkpoint(ckpt, cfg.seed);
  const IterationState b = restore_state_from_checkpoint(ckpt, cfg.seed);
  const IterationPlan plan_a =
      build_iteration_plan(cfg, a.iteration_number, a.best_metadata);
  const IterationPlan plan_b =
      build_iteration_plan(cfg, b.iteration_number, b.best_metadata);
  REQUIRE(plan_a.iteration == plan_b.iteration);
  REQUIRE(plan_a.new_subnetworks.size() == plan_b.new_subnetworks.size());
  for (std::size_t i = 0; i < plan_a.new_subnetworks.size(); ++i) {
    REQUIRE(plan_a.new_subnetworks[i].id == plan_b.new_subnetworks[i].id);
    REQUIRE(plan_a.new_subnetworks[i].spec == plan_b.new_subnetworks[i].spec);
  }
  REQUIRE(plan_a.candidates.size() == plan_b.candidates.size());
  for (std::size_t i = 0; i < plan_a.candidates.size(); ++i) {
    REQUIRE(plan_a.candidates[i].id == plan_b.candidates[i].id);
    REQUIRE(plan_a.candidates[i].member_ids == plan_b.candidates[i].member_ids);
    REQUIRE(plan_a.candidates[i].num_carried == plan_b.candidates[i].num_carried);
  }
  // The restored ensembles predict identically.
  for (const Example& e : train.examples) {
    REQUIRE(predict_ensemble(*a.best, e.features) ==
            predict_ensemble(*b.best, e.features));
  }
}

TEST_CASE("two identical runs are bit-identical") {
  TempDir dir_a;
  TempDir dir_b;
  const Dataset train = make_two_gaussians(200, 2, 3);
  const Dataset eval = make_two_gaussians(100, 2, 4);
  SearchConfig cfg = small_config();
  const SearchResult a = run_search(cfg, train, eval, dir_a.path);
  const SearchResult b = run_search(cfg, train, eval, dir_b.path);

  REQUIRE(architecture_ids(a.best) == architecture_ids(b.best));
  REQUIRE(a.best.weights.values == b.best.weights.values);
  for (std::size_t k = 0; k < a.best.subnetworks.size(); ++k) {
    REQUIRE(flatten_params(a.best.subnetworks[k]) ==
            flatten_params(b.best.subnetworks[k]));
  }
  REQUIRE(slurp(dir_a.path / "metrics.csv") == slurp(dir_b.path / "metrics.csv"));
}

TEST_CASE("crash after a checkpoint write resumes to the same final state") {
  TempDir uninterrupted;
  TempDir interrupted;
  const Dataset train = make_two_gaussians(150, 2, 9);
  const Dataset eval = make_two_gaussians(80, 2, 10);
  SearchConfig cfg = small_config();
  cfg.iterations = 3;

  const SearchResult full = run_search(cfg, train, eval, uninterrupted.path);

  struct SimulatedCrash {};
  SearchHooks hooks;
  hooks.on_iteration_start = [](std::size_t t) {
    if (t == 2) throw SimulatedCrash{};
  };
  REQUIRE_THROWS_AS(
      run_search(cfg, train, eval, interrupted.path, nullptr, &hooks),
      SimulatedCrash);

  RunLog log;
  const SearchResult resumed = run_search(cfg, train, eval, interrupted.path,
                                          &log);
  REQUIRE(resumed.start_iteration == 2);  // continued, not restarted
  REQUIRE(log.count_events("resume") == 1);
  REQUIRE(architecture_ids(resumed.best) == architecture_ids(full.best));
  REQUIRE(resumed.best.weights.values == full.best.weights.values);
  REQUIRE(slurp(interrupted.path / "metrics.csv") ==
          slurp(uninterrupted.path / "metrics.csv"));
}

TEST_CASE("single-class data yields a warning but the run completes") {
  TempDir dir;
  Dataset train = make_two_gaussians(60, 2, 13);
  for (Example& e : train.examples) e.label = 1;
  Dataset eval = make_two_gaussians(30, 2, 14);
  SearchConfig cfg = small_config();
  cfg.iterations = 1;
  RunLog log;
  const SearchResult result = run_search(cfg, train, eval, dir.path, &log);
  REQUIRE(log.count_events("warning") == 1);
  REQUIRE_FALSE(result.best.subnetworks.empty());
  REQUIRE(result.summaries[0].best_eval.margin_error >= 0.0);
}

TEST_CASE("a dataset that breaks every candidate raises a training error") {
  TempDir dir;
  Dataset train = make_two_gaussians(40, 2, 17);
  train.examples[5].features[0] = std::numeric_limits<double>::quiet_NaN();
  const Dataset eval = make_two_gaussians(20, 2, 18);
  SearchConfig cfg = small_config();
  cfg.iterations = 1;
  REQUIRE_THROWS_AS(run_search(cfg, train, eval, dir.path), TrainingError);
}

TEST_CASE("grow strategy architectures deepen across iterations") {
  TempDir dir;
  const Dataset train = make_two_gaussians(300, 2, 25, SplitTag::kTrain, 1.0);
  const Dataset eval = make_two_gaussians(150, 2, 26, SplitTag::kEval, 1.0);
  SearchConfig cfg = small_config();
  cfg.iterations = 3;
  const SearchResult result = run_search(cfg, train, eval, dir.path);
  // Iteration ids encode their birth iteration; the final ensemble must
  // contain the full carried history of the winning line.
  REQUIRE_FALSE(result.best.subnetworks.empty());
  for (const Subnetwork& sn : result.best.subnetworks) {
    REQUIRE(sn.spec.family == Family::kMlp);
    REQUIRE(sn.train_steps_done == cfg.steps_per_iteration);
  }
}
