#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "autoens/error.hpp"
#include "autoens/rng.hpp"

namespace autoens {

// One labeled example. Labels are strictly -1 or +1.
struct Example {
  std::vector<double> features;
  int label = 1;
};

enum class SplitTag { kTrain, kEval };

inline std::string to_string(SplitTag tag) {
  return tag == SplitTag::kTrain ? "train" : "eval";
}

struct Dataset {
  std::vector<Example> examples;
  SplitTag split_tag = SplitTag::kTrain;
  // Column names in feature order; empty for synthetic data built in code.
  std::vector<std::string> feature_names;

  std::size_t size() const { return examples.size(); }
  std::size_t dimension() const {
    return examples.empty() ? 0 : examples.front().features.size();
  }

  void validate() const {
    if (examples.empty()) throw PreconditionError("dataset is empty");
    const std::size_t d = examples.front().features.size();
    for (std::size_t i = 0; i < examples.size(); ++i) {
      const Example& e = examples[i];
      if (e.features.size() != d) {
        throw ShapeError("example " + std::to_string(i) + " has dimension " +
                         std::to_string(e.features.size()) + ", expected " +
                         std::to_string(d));
      }
      if (e.label != -1 && e.label != 1) {
        throw DataError("example " + std::to_string(i) + " has label " +
                        std::to_string(e.label) + ", expected -1 or +1");
      }
    }
  }

  // True when every label is the same class.
  bool single_class() const {
    if (examples.empty()) return true;
    const int first = examples.front().label;
    for (const Example& e : examples) {
      if (e.label != first) return false;
    }
    return true;
  }
};

// Two isotropic Gaussian blobs in d dimensions, one per class. The standard
// desk-scale benchmark used across the test suites.
inline Dataset make_two_gaussians(std::size_t m, std::size_t d,
                                  std::uint64_t seed,
                                  SplitTag tag = SplitTag::kTrain,
                                  double separation = 2.0) {
  Rng rng = make_stream(seed, {static_cast<std::uint64_t>(StreamPurpose::kData),
                               tag == SplitTag::kTrain ? 0ULL : 1ULL});
  Dataset out;
  out.split_tag = tag;
  out.examples.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const int label = (i % 2 == 0) ? 1 : -1;
    const double center = label > 0 ? separation / 2.0 : -separation / 2.0;
    Example e;
    e.label = label;
    e.features.reserve(d);
    for (std::size_t j = 0; j < d; ++j) {
      e.features.push_back(center + rng.normal());
    }
    out.examples.push_back(std::move(e));
  }
  out.feature_names.reserve(d);
  for (std::size_t j = 0; j < d; ++j) {
    out.feature_names.push_back("x" + std::to_string(j));
  }
  return out;
}

}  // namespace autoens
