#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "autoens/cluster.hpp"
#include "autoens/error.hpp"
#include "autoens/search.hpp"

#include "json.hpp"

namespace autoens {

namespace detail {

// Unknown keys are rejected outright: a silently ignored typo in lambda or
// rho is the most damaging user error this tool can make.
inline void reject_unknown_keys(const nlohmann::json& obj,
                                const std::vector<std::string>& allowed,
                                const std::string& context) {
  if (!obj.is_object()) {
    throw ConfigError(context + " must be a JSON object");
  }
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const std::string& name : allowed) {
      if (name == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError("unknown key '" + key + "' in " + context);
    }
  }
}

template <typename T>
T get_or(const nlohmann::json& obj, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("key '" + key + "' has the wrong type");
  }
}

inline std::string require_string(const nlohmann::json& obj,
                                  const std::string& key,
                                  const std::string& context) {
  if (!obj.contains(key)) {
    throw ConfigError("missing required key '" + key + "' in " + context);
  }
  if (!obj.at(key).is_string()) {
    throw ConfigError("key '" + key + "' in " + context + " must be a string");
  }
  return obj.at(key).get<std::string>();
}

}  // namespace detail

// Everything a run needs beyond the dataset files themselves. A run is fully
// reproducible from (RunConfig, dataset files).
struct RunConfig {
  std::filesystem::path train_data;
  std::filesystem::path eval_data;
  std::string label_column = "label";
  std::filesystem::path output_dir;
  std::uint64_t seed = 42;
  SearchConfig search;
  ClusterConfig cluster;

  void validate() const {
    if (train_data.empty()) throw ConfigError("train_data is required");
    if (eval_data.empty()) throw ConfigError("eval_data is required");
    if (output_dir.empty()) throw ConfigError("output_dir is required");
    search.validate();
    cluster.validate();
  }

  nlohmann::json to_json() const {
    nlohmann::json pool_families = nlohmann::json::array();
    for (Family family : search.generator.pool_families) {
      pool_families.push_back(to_string(family));
    }
    nlohmann::json search_json = {
        {"generator", to_string(search.generator.kind)},
        {"strategy", to_string(search.strategy)},
        {"iterations", search.iterations},
        {"steps_per_iteration", search.steps_per_iteration},
        {"batch_size", search.batch_size},
        {"learning_rate", search.learning_rate},
        {"mlp_width", search.generator.mlp_width},
        {"mlp_activation", to_string(search.generator.mlp_activation)},
        {"num_stumps", search.generator.num_stumps},
        {"pool_mlp_depth", search.generator.pool_mlp_depth},
        {"pool_families", pool_families},
        {"selection_metric", to_string(search.selection_metric)},
        {"ensembler", to_string(search.ensembler)},
    };
    nlohmann::json objective_json = {
        {"lambda", search.objective.lambda},
        {"beta", search.objective.beta},
        {"surrogate", to_string(search.objective.surrogate)},
        {"measure", to_string(search.measure.kind)},
        {"rho", search.objective.rho},
        {"max_prox_steps", search.objective.max_prox_steps},
        {"tol", search.objective.tol},
    };
    nlohmann::json fault_plan = nlohmann::json::array();
    for (const FaultInjection& f : cluster.fault_plan) {
      fault_plan.push_back({f.worker_index, f.at_step});
    }
    nlohmann::json cluster_json = {
        {"num_workers", cluster.num_workers},
        {"strategy", to_string(cluster.strategy)},
        {"fault_plan", fault_plan},
        {"watchdog_ms", cluster.watchdog_ms},
        {"commit_every_steps", cluster.commit_every_steps},
    };
    return {
        {"train_data", train_data.string()},
        {"eval_data", eval_data.string()},
        {"label_column", label_column},
        {"output_dir", output_dir.string()},
        {"seed", seed},
        {"search", search_json},
        {"objective", objective_json},
        {"cluster", cluster_json},
    };
  }

  static RunConfig from_json(const nlohmann::json& doc) {
    detail::reject_unknown_keys(
        doc,
        {"train_data", "eval_data", "label_column", "output_dir", "seed",
         "search", "objective", "cluster"},
        "config");
    RunConfig cfg;
    cfg.train_data = detail::require_string(doc, "train_data", "config");
    cfg.eval_data = detail::require_string(doc, "eval_data", "config");
    cfg.output_dir = detail::require_string(doc, "output_dir", "config");
    cfg.label_column =
        detail::get_or<std::string>(doc, "label_column", "label");
    cfg.seed = detail::get_or<std::uint64_t>(doc, "seed", 42);

    if (doc.contains("search")) {
      const auto& s = doc.at("search");
      detail::reject_unknown_keys(
          s,
          {"generator", "strategy", "iterations", "steps_per_iteration",
           "batch_size", "learning_rate", "mlp_width", "mlp_activation",
           "num_stumps", "pool_mlp_depth", "pool_families", "selection_metric",
           "ensembler"},
          "config.search");
      cfg.search.generator.kind = generator_from_string(
          detail::get_or<std::string>(s, "generator", "grow"));
      cfg.search.strategy = strategy_from_string(
          detail::get_or<std::string>(s, "strategy", "grow"));
      cfg.search.iterations = detail::get_or<std::size_t>(s, "iterations", 4);
      cfg.search.steps_per_iteration =
          detail::get_or<std::size_t>(s, "steps_per_iteration", 300);
      cfg.search.batch_size = detail::get_or<std::size_t>(s, "batch_size", 32);
      cfg.search.learning_rate =
          detail::get_or<double>(s, "learning_rate", 0.1);
      cfg.search.generator.mlp_width =
          detail::get_or<std::size_t>(s, "mlp_width", 8);
      cfg.search.generator.mlp_activation = activation_from_string(
          detail::get_or<std::string>(s, "mlp_activation", "tanh"));
      cfg.search.generator.num_stumps =
          detail::get_or<std::size_t>(s, "num_stumps", 16);
      cfg.search.generator.pool_mlp_depth =
          detail::get_or<std::size_t>(s, "pool_mlp_depth", 2);
      if (s.contains("pool_families")) {
        if (!s.at("pool_families").is_array()) {
          throw ConfigError("config.search.pool_families must be an array");
        }
        cfg.search.generator.pool_families.clear();
        for (const auto& entry : s.at("pool_families")) {
          cfg.search.generator.pool_families.push_back(
              family_from_string(entry.get<std::string>()));
        }
      }
      cfg.search.selection_metric = selection_metric_from_string(
          detail::get_or<std::string>(s, "selection_metric", "train_objective"));
      cfg.search.ensembler = ensembler_from_string(detail::get_or<std::string>(
          s, "ensembler", "complexity_regularized"));
    }

    if (doc.contains("objective")) {
      const auto& o = doc.at("objective");
      detail::reject_unknown_keys(
          o,
          {"lambda", "beta", "surrogate", "measure", "rho", "max_prox_steps",
           "tol"},
          "config.objective");
      cfg.search.objective.lambda = detail::get_or<double>(o, "lambda", 0.0);
      cfg.search.objective.beta = detail::get_or<double>(o, "beta", 0.0);
      cfg.search.objective.surrogate = surrogate_from_string(
          detail::get_or<std::string>(o, "surrogate", "exp"));
      cfg.search.measure.kind = measure_from_string(
          detail::get_or<std::string>(o, "measure", "rademacher_proxy"));
      cfg.search.objective.rho = detail::get_or<double>(o, "rho", 0.1);
      cfg.search.objective.max_prox_steps =
          detail::get_or<std::size_t>(o, "max_prox_steps", 500);
      cfg.search.objective.tol = detail::get_or<double>(o, "tol", 1e-9);
    }

    if (doc.contains("cluster")) {
      const auto& c = doc.at("cluster");
      detail::reject_unknown_keys(
          c,
          {"num_workers", "strategy", "fault_plan", "watchdog_ms",
           "commit_every_steps"},
          "config.cluster");
      cfg.cluster.num_workers =
          detail::get_or<std::size_t>(c, "num_workers", 1);
      cfg.cluster.strategy = distribute_strategy_from_string(
          detail::get_or<std::string>(c, "strategy", "replication"));
      if (c.contains("fault_plan")) {
        if (!c.at("fault_plan").is_array()) {
          throw ConfigError("config.cluster.fault_plan must be an array");
        }
        for (const auto& entry : c.at("fault_plan")) {
          if (!entry.is_array() || entry.size() != 2) {
            throw ConfigError(
                "config.cluster.fault_plan entries must be [worker, step]");
          }
          cfg.cluster.fault_plan.push_back(
              {entry.at(0).get<std::size_t>(), entry.at(1).get<std::uint64_t>()});
        }
      }
      cfg.cluster.watchdog_ms =
          detail::get_or<std::uint64_t>(c, "watchdog_ms", 30000);
      cfg.cluster.commit_every_steps =
          detail::get_or<std::size_t>(c, "commit_every_steps", 25);
    }

    cfg.search.seed = cfg.seed;
    cfg.validate();
    return cfg;
  }
};

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& err) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " +
                      err.what());
  }
  return RunConfig::from_json(doc);
}

}  // namespace autoens
