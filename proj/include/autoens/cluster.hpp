#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "autoens/checkpoint.hpp"
#include "autoens/dataset.hpp"
#include "autoens/error.hpp"
#include "autoens/log.hpp"
#include "autoens/metrics.hpp"
#include "autoens/search.hpp"

namespace autoens {

enum class RoleKind { kChief, kTrainer, kEnsembleTrainer };

inline std::string to_string(RoleKind k) {
  switch (k) {
    case RoleKind::kChief: return "chief";
    case RoleKind::kTrainer: return "trainer";
    case RoleKind::kEnsembleTrainer: return "ensemble_trainer";
  }
  return "unknown";
}

struct WorkerRole {
  RoleKind kind = RoleKind::kTrainer;
  std::size_t worker_index = 0;
};

enum class DistributeStrategy { kReplication, kRoundRobin };

inline std::string to_string(DistributeStrategy s) {
  return s == DistributeStrategy::kReplication ? "replication" : "round_robin";
}

inline DistributeStrategy distribute_strategy_from_string(const std::string& s) {
  if (s == "replication") return DistributeStrategy::kReplication;
  if (s == "round_robin") return DistributeStrategy::kRoundRobin;
  throw ConfigError("unknown distribute strategy '" + s + "'");
}

// A scheduled preemption: the worker is killed when its local work-unit
// counter reaches at_step. Work units are train steps, candidate fits, and
// bookkeeping attempts; waits do not advance the counter.
struct FaultInjection {
  std::size_t worker_index = 0;
  std::uint64_t at_step = 0;
};

struct ClusterConfig {
  std::size_t num_workers = 1;
  DistributeStrategy strategy = DistributeStrategy::kReplication;
  std::vector<FaultInjection> fault_plan;
  std::uint64_t watchdog_ms = 30000;
  std::size_t commit_every_steps = 25;  // round-robin parameter push cadence

  void validate() const {
    if (num_workers == 0) throw ConfigError("num_workers must be >= 1");
    if (commit_every_steps == 0) {
      throw ConfigError("commit_every_steps must be >= 1");
    }
  }
};

// Subnetwork index -> trainer slot, round-robin by position.
inline std::vector<std::size_t> assign_round_robin(
    std::size_t num_trainers, const std::vector<std::string>& subnetwork_ids) {
  if (num_trainers == 0) {
    throw PreconditionError("assign_round_robin: need at least one trainer");
  }
  std::vector<std::size_t> assignment;
  assignment.reserve(subnetwork_ids.size());
  for (std::size_t i = 0; i < subnetwork_ids.size(); ++i) {
    assignment.push_back(i % num_trainers);
  }
  return assignment;
}

// Versioned named parameter slots shared by all workers. Commits are atomic
// per slot and keep the highest version; every write is recorded in an audit
// trail so tests can verify slot ownership.
class ParamStore {
 public:
  struct AuditRecord {
    std::string slot;
    std::size_t worker = 0;
    std::uint64_t version = 0;
  };

  void commit(const std::string& slot, std::vector<double> value,
              std::uint64_t version, std::size_t worker) {
    std::lock_guard<std::mutex> lock(mutex_);
    audit_.push_back({slot, worker, version});
    Slot& s = slots_[slot];
    if (version > s.version) {
      s.value = std::move(value);
      s.version = version;
    }
    cv_.notify_all();
  }

  std::optional<std::pair<std::vector<double>, std::uint64_t>> read(
      const std::string& slot) const {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto it = slots_.find(slot);
    if (it == slots_.end()) return std::nullopt;
    return std::make_pair(it->second.value, it->second.version);
  }

  // Blocks until pred() holds (evaluated under the store lock). The abort
  // flag turns a peer's fatal failure into a prompt local exit; the deadline
  // turns a deadlock into a diagnosable error.
  template <typename Pred>
  void await(Pred pred, std::chrono::milliseconds timeout,
             const std::atomic<bool>& abort, const std::string& what) const {
    std::unique_lock<std::mutex> lock(mutex_);
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (!pred()) {
      if (abort.load()) throw ClusterError("aborted while waiting for " + what);
      if (cv_.wait_until(lock, deadline) == std::cv_status::timeout &&
          !pred()) {
        throw ClusterError("watchdog timeout waiting for " + what + "\n" +
                           diagnostic_dump_locked());
      }
    }
  }

  std::uint64_t version_of(const std::string& slot) const {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto it = slots_.find(slot);
    return it == slots_.end() ? 0 : it->second.version;
  }

  bool has(const std::string& slot) const { return version_of(slot) > 0; }

  std::vector<AuditRecord> audit() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return audit_;
  }

 private:
  struct Slot {
    std::vector<double> value;
    std::uint64_t version = 0;
  };

  // Pre: mutex_ held.
  std::string diagnostic_dump_locked() const {
    std::string dump = "param store slots:";
    for (const auto& [name, slot] : slots_) {
      dump += "\n  " + name + " @v" + std::to_string(slot.version);
    }
    return dump;
  }

  // await() needs to re-check map state under the same lock the predicate
  // captured, hence the version helpers below for predicate bodies.
 public:
  std::uint64_t version_of_locked(const std::string& slot) const {
    const auto it = slots_.find(slot);
    return it == slots_.end() ? 0 : it->second.version;
  }

 private:
  mutable std::mutex mutex_;
  mutable std::condition_variable cv_;
  std::map<std::string, Slot> slots_;
  std::vector<AuditRecord> audit_;
};

// Thrown to simulate preemption; intentionally not derived from Error so the
// per-candidate failure handlers never swallow it.
struct PreemptionSignal {
  std::size_t worker_index = 0;
  std::uint64_t at_step = 0;
};

struct ClusterResult {
  EnsembleModel best;
  std::string best_candidate_id;
  std::vector<IterationSummary> summaries;
};

// In-process simulation of the distributed run: workers are threads sharing
// a ParamStore and the checkpoint directory. Worker 0 is the chief; under
// round_robin with at least 3 workers, worker 1 is a dedicated ensemble
// trainer, otherwise the chief doubles as one. Per-subnetwork RNG streams are
// keyed by subnetwork id, so placement never changes the trained parameters.
class ClusterSim {
 public:
  ClusterSim(SearchConfig search_cfg, ClusterConfig cluster_cfg, Dataset train,
             Dataset eval, std::filesystem::path out_dir, RunLog* log)
      : search_cfg_(std::move(search_cfg)),
        cluster_cfg_(std::move(cluster_cfg)),
        train_(std::move(train)),
        eval_(std::move(eval)),
        out_dir_(std::move(out_dir)),
        checkpoint_dir_(out_dir_ / "checkpoints"),
        log_(log) {
    search_cfg_.validate();
    cluster_cfg_.validate();
    for (const FaultInjection& f : cluster_cfg_.fault_plan) {
      schedule_fault(f.worker_index, f.at_step);
    }
  }

  // Schedules a preemption of the given worker at the given local work-unit
  // count. Usable before or during a run.
  void schedule_fault(std::size_t worker_index, std::uint64_t at_step) {
    if (worker_index >= cluster_cfg_.num_workers) {
      throw PreconditionError("schedule_fault: worker " +
                              std::to_string(worker_index) + " does not exist");
    }
    std::lock_guard<std::mutex> lock(faults_mutex_);
    pending_faults_.push_back({worker_index, at_step});
  }

  WorkerRole role_of(std::size_t worker_index) const {
    if (worker_index == 0) return {RoleKind::kChief, 0};
    if (has_dedicated_ensemble_trainer() && worker_index == 1) {
      return {RoleKind::kEnsembleTrainer, 1};
    }
    return {RoleKind::kTrainer, worker_index};
  }

  ClusterResult run() {
    train_.validate();
    eval_.validate();
    std::filesystem::create_directories(checkpoint_dir_);
    if (train_.single_class() && log_ != nullptr) {
      log_->record({{"event", "warning"},
                    {"message", "training dataset contains a single class"}});
    }

    std::vector<std::thread> workers;
    workers.reserve(cluster_cfg_.num_workers);
    for (std::size_t w = 0; w < cluster_cfg_.num_workers; ++w) {
      workers.emplace_back([this, w] { worker_main(w); });
    }
    for (auto& worker : workers) worker.join();

    if (fatal_.load()) {
      std::lock_guard<std::mutex> lock(error_mutex_);
      throw ClusterError(error_message_);
    }

    const IterationState final_state = restore_state_from_checkpoint(
        load_checkpoint(checkpoint_dir_), search_cfg_.seed);
    ClusterResult result;
    result.best = *final_state.best;
    result.best_candidate_id = final_state.best_candidate_id;
    {
      std::lock_guard<std::mutex> lock(summaries_mutex_);
      for (auto& [iteration, summary] : summaries_) result.summaries.push_back(summary);
    }
    return result;
  }

 private:
  struct WorkerContext {
    std::size_t worker_index = 0;
    std::uint64_t local_step = 0;
    std::size_t iteration = 0;
  };

  bool has_dedicated_ensemble_trainer() const {
    return cluster_cfg_.strategy == DistributeStrategy::kRoundRobin &&
           cluster_cfg_.num_workers >= 3;
  }

  std::size_t ensemble_owner() const {
    return has_dedicated_ensemble_trainer() ? 1 : 0;
  }

  std::vector<std::size_t> trainer_workers() const {
    std::vector<std::size_t> trainers;
    for (std::size_t w = 0; w < cluster_cfg_.num_workers; ++w) {
      if (has_dedicated_ensemble_trainer() && w == 1) continue;
      trainers.push_back(w);
    }
    return trainers;
  }

  // --- shared-state naming ---

  static std::string subnetwork_slot(std::size_t iteration,
                                     const std::string& id) {
    return "t" + std::to_string(iteration) + "/sn/" + id;
  }

  static std::string candidate_weights_slot(std::size_t iteration,
                                            const std::string& id) {
    return "t" + std::to_string(iteration) + "/cand/" + id + "/weights";
  }

  static std::string candidate_status_slot(std::size_t iteration,
                                           const std::string& id) {
    return "t" + std::to_string(iteration) + "/cand/" + id + "/status";
  }

  // --- fault machinery ---

  void maybe_fault(WorkerContext& ctx) {
    ++ctx.local_step;
    std::lock_guard<std::mutex> lock(faults_mutex_);
    for (auto it = pending_faults_.begin(); it != pending_faults_.end(); ++it) {
      if (it->worker_index == ctx.worker_index && it->at_step == ctx.local_step) {
        pending_faults_.erase(it);
        throw PreemptionSignal{ctx.worker_index, ctx.local_step};
      }
    }
  }

  std::chrono::milliseconds watchdog() const {
    return std::chrono::milliseconds(cluster_cfg_.watchdog_ms);
  }

  // --- worker phases ---

  void worker_main(std::size_t worker_index) {
    WorkerContext ctx;
    ctx.worker_index = worker_index;
    while (!fatal_.load()) {
      try {
        IterationState state = restore_or_fresh();
        if (state.iteration_number >= search_cfg_.iterations) return;
        ctx.iteration = state.iteration_number;
        run_worker_iteration(ctx, state);
      } catch (const PreemptionSignal& signal) {
        // The worker loses its in-memory state and comes back up from the
        // checkpoint store; committed ParamStore progress survives, the same
        // way parameter servers outlive worker preemption.
        if (log_ != nullptr) {
          log_->record({{"event", "preempt"},
                        {"worker", signal.worker_index},
                        {"step", signal.at_step},
                        {"iteration", ctx.iteration}});
          log_->record({{"event", "recover"},
                        {"worker", signal.worker_index},
                        {"iteration", ctx.iteration}});
        }
        continue;
      } catch (const std::exception& err) {
        bool expected = false;
        if (fatal_.compare_exchange_strong(expected, true)) {
          std::lock_guard<std::mutex> lock(error_mutex_);
          error_message_ = "worker " + std::to_string(worker_index) +
                           " failed: " + err.what();
        }
        return;
      }
    }
  }

  IterationState restore_or_fresh() {
    if (auto ckpt = try_load_checkpoint(checkpoint_dir_); ckpt.has_value()) {
      return restore_state_from_checkpoint(*ckpt, search_cfg_.seed);
    }
    return IterationState{};
  }

  void run_worker_iteration(WorkerContext& ctx, IterationState& state) {
    const std::size_t t = state.iteration_number;
    const WorkerRole role = role_of(ctx.worker_index);
    if (log_ != nullptr) {
      log_->record({{"event", "iteration_start"},
                    {"worker", ctx.worker_index},
                    {"role", to_string(role.kind)},
                    {"iteration", t}});
    }
    const IterationPlan plan =
        build_iteration_plan(search_cfg_, t, state.best_metadata);

    if (cluster_cfg_.strategy == DistributeStrategy::kReplication) {
      train_phase_replication(ctx, plan);
    } else {
      train_phase_round_robin(ctx, plan, role);
    }

    if (ctx.worker_index == ensemble_owner()) {
      ensemble_phase(ctx, plan, state);
    }
    if (role.kind == RoleKind::kChief) {
      bookkeeping_phase(ctx, plan, state);
    }
    await_next_checkpoint(ctx, t);
  }

  void train_subnetwork_shared(WorkerContext& ctx,
                               const SubnetworkPlanEntry& entry,
                               std::size_t iteration, bool lockstep) {
    const std::string slot = subnetwork_slot(iteration, entry.id);
    Subnetwork sn = make_subnetwork(entry.spec, entry.id, train_.dimension(),
                                    search_cfg_.seed);
    if (const auto committed = store_.read(slot); committed.has_value()) {
      unflatten_params(sn, committed->first);
      sn.train_steps_done = committed->second;
    }
    const std::size_t target = search_cfg_.steps_per_iteration;
    const std::size_t num_workers = cluster_cfg_.num_workers;
    while (sn.train_steps_done < target) {
      const std::size_t step = sn.train_steps_done;
      if (lockstep && step % num_workers != ctx.worker_index) {
        // Another worker owns this step; wait for its commit.
        store_.await(
            [&] { return store_.version_of_locked(slot) >= step + 1; },
            watchdog(), fatal_, slot + " @v" + std::to_string(step + 1));
        const auto committed = store_.read(slot);
        unflatten_params(sn, committed->first);
        sn.train_steps_done = committed->second;
        continue;
      }
      maybe_fault(ctx);
      const auto batch = sample_batch(train_, search_cfg_.batch_size,
                                      search_cfg_.seed, sn.id, step);
      train_step(sn, batch, search_cfg_.learning_rate);
      const bool commit_now =
          lockstep || sn.train_steps_done % cluster_cfg_.commit_every_steps == 0 ||
          sn.train_steps_done == target;
      if (commit_now) {
        store_.commit(slot, flatten_params(sn), sn.train_steps_done,
                      ctx.worker_index);
      }
    }
  }

  // Replication: every worker walks every subnetwork; step s of each
  // subnetwork is executed by worker (s mod num_workers) and shared through
  // the store before anyone proceeds to s+1. A fixed commit order per step.
  void train_phase_replication(WorkerContext& ctx, const IterationPlan& plan) {
    for (const SubnetworkPlanEntry& entry : plan.new_subnetworks) {
      train_subnetwork_shared(ctx, entry, plan.iteration, /*lockstep=*/true);
    }
    if (log_ != nullptr) {
      log_->record({{"event", "train_phase_done"},
                    {"worker", ctx.worker_index},
                    {"iteration", plan.iteration}});
    }
  }

  // Round-robin: new subnetworks land on dedicated trainers by index modulo
  // trainer count; each trainer pushes committed parameters on a fixed step
  // cadence and at completion.
  void train_phase_round_robin(WorkerContext& ctx, const IterationPlan& plan,
                               const WorkerRole& role) {
    if (role.kind == RoleKind::kEnsembleTrainer) return;
    const std::vector<std::size_t> trainers = trainer_workers();
    std::size_t my_slot = trainers.size();
    for (std::size_t i = 0; i < trainers.size(); ++i) {
      if (trainers[i] == ctx.worker_index) my_slot = i;
    }
    if (my_slot == trainers.size()) return;

    std::vector<std::string> ids;
    for (const auto& entry : plan.new_subnetworks) ids.push_back(entry.id);
    const std::vector<std::size_t> assignment =
        assign_round_robin(trainers.size(), ids);
    for (std::size_t i = 0; i < plan.new_subnetworks.size(); ++i) {
      if (assignment[i] != my_slot) continue;
      train_subnetwork_shared(ctx, plan.new_subnetworks[i], plan.iteration,
                              /*lockstep=*/false);
    }
    if (log_ != nullptr) {
      log_->record({{"event", "train_phase_done"},
                    {"worker", ctx.worker_index},
                    {"iteration", plan.iteration}});
    }
  }

  void await_trained_subnetworks(const IterationPlan& plan) {
    const std::size_t target = search_cfg_.steps_per_iteration;
    for (const SubnetworkPlanEntry& entry : plan.new_subnetworks) {
      const std::string slot = subnetwork_slot(plan.iteration, entry.id);
      store_.await([&] { return store_.version_of_locked(slot) >= target; },
                   watchdog(), fatal_, slot + " fully trained");
    }
  }

  SubnetworkPool build_pool(const IterationPlan& plan,
                            const IterationState& state) {
    SubnetworkPool pool;
    if (state.best.has_value()) {
      for (const Subnetwork& sn : state.best->subnetworks) {
        pool.emplace(sn.id, sn);
      }
    }
    for (const SubnetworkPlanEntry& entry : plan.new_subnetworks) {
      const auto committed =
          store_.read(subnetwork_slot(plan.iteration, entry.id));
      if (!committed.has_value()) {
        throw ClusterError("no committed parameters for " + entry.id);
      }
      Subnetwork sn = make_subnetwork(entry.spec, entry.id, train_.dimension(),
                                      search_cfg_.seed);
      unflatten_params(sn, committed->first);
      sn.train_steps_done = committed->second;
      pool.emplace(sn.id, std::move(sn));
    }
    return pool;
  }

  // The ensemble owner loads every subnetwork read-only and fits only the
  // mixture weights, committing them per candidate.
  void ensemble_phase(WorkerContext& ctx, const IterationPlan& plan,
                      const IterationState& state) {
    await_trained_subnetworks(plan);
    const SubnetworkPool pool = build_pool(plan, state);
    const std::vector<double> prev_weights =
        state.best.has_value() ? state.best->weights.values
                               : std::vector<double>{};
    for (const CandidateBlueprint& bp : plan.candidates) {
      const std::string status_slot =
          candidate_status_slot(plan.iteration, bp.id);
      if (store_.version_of(status_slot) > 0) continue;  // already done
      maybe_fault(ctx);
      const IterationPlan single{plan.iteration, {}, {bp}};
      Candidate c =
          assemble_candidates(single, pool, search_cfg_.strategy).front();
      try {
        fit_candidate(c, train_, search_cfg_, prev_weights);
        store_.commit(candidate_weights_slot(plan.iteration, bp.id),
                      c.weights.values, 1, ctx.worker_index);
        store_.commit(status_slot, {0.0}, 1, ctx.worker_index);
      } catch (const Error&) {
        store_.commit(status_slot, {1.0}, 1, ctx.worker_index);
      }
    }
    if (log_ != nullptr) {
      log_->record({{"event", "ensemble_phase_done"},
                    {"worker", ctx.worker_index},
                    {"iteration", plan.iteration}});
    }
  }

  void bookkeeping_phase(WorkerContext& ctx, const IterationPlan& plan,
                         const IterationState& state) {
    const std::size_t t = plan.iteration;
    // Wait for every candidate to be fitted (or marked failed).
    for (const CandidateBlueprint& bp : plan.candidates) {
      const std::string slot = candidate_status_slot(t, bp.id);
      store_.await([&] { return store_.version_of_locked(slot) >= 1; },
                   watchdog(), fatal_, slot);
    }
    await_trained_subnetworks(plan);

    const SubnetworkPool pool = build_pool(plan, state);
    std::vector<Candidate> candidates;
    for (const CandidateBlueprint& bp : plan.candidates) {
      const auto status = store_.read(candidate_status_slot(t, bp.id));
      Candidate c;
      if (status->first.at(0) != 0.0) {
        c.id = bp.id;
        c.carried_forward = bp.carried_forward;
        c.strategy_tag = to_string(search_cfg_.strategy);
        c.failed = true;
        c.failure = "candidate failed on the ensemble trainer";
        candidates.push_back(std::move(c));
        continue;
      }
      const IterationPlan single{t, {}, {bp}};
      c = assemble_candidates(single, pool, search_cfg_.strategy).front();
      c.weights.values = store_.read(candidate_weights_slot(t, bp.id))->first;
      for (const Subnetwork& sn : c.subnetworks) {
        c.reports.push_back(
            make_complexity_report(search_cfg_.measure, sn, train_));
      }
      evaluate_candidate(c, train_, eval_, search_cfg_);
      candidates.push_back(std::move(c));
    }

    const std::size_t best_index = select_best(candidates);
    const Candidate& best = candidates[best_index];
    const std::uint64_t next_global_step =
        state.global_step + search_cfg_.steps_per_iteration;

    // Metrics rows land before the checkpoint commit; if the chief dies in
    // between, the reopened writer truncates them and the redo reproduces
    // byte-identical rows.
    MetricsWriter metrics;
    metrics.open(out_dir_ / "metrics.csv", t);
    emit_iteration_metrics(metrics, t, next_global_step, candidates, best_index);

    if (log_ != nullptr) {
      log_->record({{"event", "bookkeeping_reached"},
                    {"worker", ctx.worker_index},
                    {"unit", ctx.local_step + 1},
                    {"iteration", t}});
    }
    maybe_fault(ctx);  // the mid-bookkeeping preemption point

    const Checkpoint ckpt = make_boundary_checkpoint(t, best, next_global_step,
                                                     train_.dimension());
    save_checkpoint(ckpt, checkpoint_dir_);
    if (log_ != nullptr) {
      log_->record({{"event", "bookkeeping_commit"},
                    {"worker", ctx.worker_index},
                    {"iteration", t},
                    {"next_iteration", t + 1},
                    {"global_step", next_global_step}});
    }

    IterationSummary summary;
    summary.iteration = t;
    summary.best_candidate_id = best.id;
    summary.best_score = best.eval.selection_score;
    summary.best_eval = best.eval;
    summary.num_candidates = candidates.size();
    for (const Candidate& c : candidates) {
      summary.scores.push_back(c.failed
                                   ? std::numeric_limits<double>::infinity()
                                   : c.eval.selection_score);
    }
    {
      std::lock_guard<std::mutex> lock(summaries_mutex_);
      summaries_[t] = std::move(summary);
    }
  }

  // Non-chief workers idle-loop here until the chief publishes the expanded
  // checkpoint for t+1; the chief passes straight through.
  void await_next_checkpoint(WorkerContext& ctx, std::size_t t) {
    const auto deadline = std::chrono::steady_clock::now() + watchdog();
    while (true) {
      if (fatal_.load()) {
        throw ClusterError("aborted while waiting for checkpoint t=" +
                           std::to_string(t + 1));
      }
      for (const CheckpointName& name : list_checkpoints(checkpoint_dir_)) {
        if (name.iteration >= t + 1) {
          if (log_ != nullptr && ctx.worker_index != 0) {
            log_->record({{"event", "observed_checkpoint"},
                          {"worker", ctx.worker_index},
                          {"iteration", name.iteration}});
          }
          return;
        }
      }
      if (std::chrono::steady_clock::now() > deadline) {
        throw ClusterError("watchdog timeout waiting for checkpoint t=" +
                           std::to_string(t + 1) + " on worker " +
                           std::to_string(ctx.worker_index));
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
  }

  SearchConfig search_cfg_;
  ClusterConfig cluster_cfg_;
  Dataset train_;
  Dataset eval_;
  std::filesystem::path out_dir_;
  std::filesystem::path checkpoint_dir_;
  RunLog* log_ = nullptr;

  ParamStore store_;
  std::atomic<bool> fatal_{false};
  std::mutex error_mutex_;
  std::string error_message_;
  std::mutex faults_mutex_;
  std::vector<FaultInjection> pending_faults_;
  std::mutex summaries_mutex_;
  std::map<std::size_t, IterationSummary> summaries_;

 public:
  const ParamStore& store() const { return store_; }
};

// Convenience wrapper mirroring run_search.
inline ClusterResult run_cluster(const SearchConfig& search_cfg,
                                 const ClusterConfig& cluster_cfg,
                                 const Dataset& train, const Dataset& eval,
                                 const std::filesystem::path& out_dir,
                                 RunLog* log = nullptr) {
  ClusterSim sim(search_cfg, cluster_cfg, train, eval, out_dir, log);
  return sim.run();
}

}  // namespace autoens
