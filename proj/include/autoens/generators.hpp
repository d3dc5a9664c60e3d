#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "autoens/error.hpp"
#include "autoens/subnetwork.hpp"

#include "json.hpp"

namespace autoens {

enum class GeneratorKind { kGrow, kPool };

inline std::string to_string(GeneratorKind k) {
  return k == GeneratorKind::kGrow ? "grow" : "pool";
}

inline GeneratorKind generator_from_string(const std::string& s) {
  if (s == "grow") return GeneratorKind::kGrow;
  if (s == "pool") return GeneratorKind::kPool;
  throw ConfigError("unknown generator '" + s + "'");
}

struct GeneratorConfig {
  GeneratorKind kind = GeneratorKind::kGrow;
  std::size_t mlp_width = 8;
  Activation mlp_activation = Activation::kTanh;
  std::size_t num_stumps = 16;     // pool stumps candidate
  std::size_t pool_mlp_depth = 2;  // pool mlp candidate
  // Which families the pool generator emits, default the full fixed pool.
  std::vector<Family> pool_families{Family::kLinear, Family::kMlp,
                                    Family::kStumps};
};

// Deepest mlp depth in an architecture-metadata array; linear and stumps
// members count as depth 0.
inline std::size_t deepest_mlp_depth(const nlohmann::json& subnetworks_meta) {
  std::size_t deepest = 0;
  for (const auto& j : subnetworks_meta) {
    const SubnetworkSpec spec = SubnetworkSpec::from_json(j);
    if (spec.family == Family::kMlp && spec.depth > deepest) {
      deepest = spec.depth;
    }
  }
  return deepest;
}

// New candidate architectures for iteration t.
//
// grow: reads the deepest mlp depth l of the previous best ensemble and emits
// mlps of depth l and l+1. With no previous best (iteration 0) it emits
// depths 0 and 1, the depth-0 mlp being the linear base case.
//
// pool: the fixed candidate pool {linear, mlp, stumps} every iteration.
inline std::vector<SubnetworkSpec> generate_candidates(
    const GeneratorConfig& cfg,
    const std::optional<nlohmann::json>& previous_best_subnetworks,
    std::size_t iteration) {
  std::vector<SubnetworkSpec> specs;
  switch (cfg.kind) {
    case GeneratorKind::kGrow: {
      std::size_t base_depth = 0;
      if (previous_best_subnetworks.has_value()) {
        base_depth = deepest_mlp_depth(*previous_best_subnetworks);
      }
      for (std::size_t depth : {base_depth, base_depth + 1}) {
        SubnetworkSpec spec;
        spec.family = Family::kMlp;
        spec.depth = depth;
        spec.width = cfg.mlp_width;
        spec.activation = cfg.mlp_activation;
        specs.push_back(spec);
      }
      break;
    }
    case GeneratorKind::kPool: {
      if (cfg.pool_families.empty()) {
        throw ConfigError("pool generator needs at least one family");
      }
      for (Family family : cfg.pool_families) {
        SubnetworkSpec spec;
        spec.family = family;
        if (family == Family::kMlp) {
          spec.depth = cfg.pool_mlp_depth;
          spec.width = cfg.mlp_width;
          spec.activation = cfg.mlp_activation;
        } else if (family == Family::kStumps) {
          spec.num_stumps = cfg.num_stumps;
        }
        specs.push_back(spec);
      }
      break;
    }
  }
  (void)iteration;
  return specs;
}

// Deterministic id for the i-th new subnetwork of iteration t.
inline std::string subnetwork_id(std::size_t iteration,
                                 const SubnetworkSpec& spec, std::size_t index) {
  std::string id = "t" + std::to_string(iteration) + "-" + to_string(spec.family);
  if (spec.family == Family::kMlp) {
    id += "-d" + std::to_string(spec.depth);
  } else if (spec.family == Family::kStumps) {
    id += "-n" + std::to_string(spec.num_stumps);
  }
  id += "-" + std::to_string(index);
  return id;
}

}  // namespace autoens
