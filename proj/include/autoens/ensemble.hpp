#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "autoens/complexity.hpp"
#include "autoens/dataset.hpp"
#include "autoens/error.hpp"
#include "autoens/matrix.hpp"
#include "autoens/objective.hpp"
#include "autoens/subnetwork.hpp"

namespace autoens {

// Mixture weights aligned by index with an ensemble's subnetwork list.
struct MixtureWeights {
  std::vector<double> values;

  double l1_norm() const {
    double acc = 0.0;
    for (double w : values) acc += std::abs(w);
    return acc;
  }
};

// Uniform baseline: w_k = 1/l exactly.
inline MixtureWeights uniform_weights(std::size_t l) {
  if (l == 0) throw PreconditionError("uniform_weights: l must be >= 1");
  MixtureWeights w;
  w.values.assign(l, 1.0 / static_cast<double>(l));
  return w;
}

// The weighted combination f = sum_k w_k h_k.
struct EnsembleModel {
  std::vector<Subnetwork> subnetworks;
  MixtureWeights weights;
  double objective_value = 0.0;
  std::vector<ComplexityReport> complexity_reports;
};

// f(x) in fixed index order.
inline double predict_ensemble(const EnsembleModel& ens,
                               const std::vector<double>& x) {
  if (ens.subnetworks.size() != ens.weights.values.size()) {
    throw ShapeError("ensemble has " + std::to_string(ens.subnetworks.size()) +
                     " subnetworks but " +
                     std::to_string(ens.weights.values.size()) + " weights");
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < ens.subnetworks.size(); ++k) {
    acc += ens.weights.values[k] * predict(ens.subnetworks[k], x);
  }
  return acc;
}

// Per-example per-subnetwork logit matrix (m x N), the input to the weight
// objective. Row order follows the dataset, columns the subnetwork list.
inline DenseMatrix ensemble_logits(const std::vector<Subnetwork>& subnetworks,
                                   const Dataset& data) {
  DenseMatrix logits(data.examples.size(), subnetworks.size());
  for (std::size_t i = 0; i < data.examples.size(); ++i) {
    for (std::size_t j = 0; j < subnetworks.size(); ++j) {
      logits.at(i, j) = predict(subnetworks[j], data.examples[i].features);
    }
  }
  return logits;
}

inline std::vector<int> dataset_labels(const Dataset& data) {
  std::vector<int> labels;
  labels.reserve(data.examples.size());
  for (const Example& e : data.examples) labels.push_back(e.label);
  return labels;
}

inline std::vector<double> ensemble_outputs(const DenseMatrix& logits,
                                            const MixtureWeights& weights) {
  if (logits.cols != weights.values.size()) {
    throw ShapeError("ensemble_outputs: " + std::to_string(logits.cols) +
                     " columns vs " + std::to_string(weights.values.size()) +
                     " weights");
  }
  std::vector<double> out(logits.rows, 0.0);
  for (std::size_t i = 0; i < logits.rows; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < logits.cols; ++j) {
      acc += weights.values[j] * logits.at(i, j);
    }
    out[i] = acc;
  }
  return out;
}

// Fraction of examples with margin y f(x) <= rho.
inline double margin_error(const std::vector<double>& outputs,
                           const std::vector<int>& labels, double rho) {
  if (!(rho > 0.0) || rho > 1.0) {
    throw PreconditionError("margin_error: rho must be in (0, 1]");
  }
  if (outputs.size() != labels.size()) {
    throw ShapeError("margin_error: " + std::to_string(outputs.size()) +
                     " outputs vs " + std::to_string(labels.size()) + " labels");
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (static_cast<double>(labels[i]) * outputs[i] <= rho) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(outputs.size());
}

// Classification accuracy with sign(0) treated as +1.
inline double accuracy(const std::vector<double>& outputs,
                       const std::vector<int>& labels) {
  if (outputs.size() != labels.size()) {
    throw ShapeError("accuracy: " + std::to_string(outputs.size()) +
                     " outputs vs " + std::to_string(labels.size()) + " labels");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const int predicted = outputs[i] >= 0.0 ? 1 : -1;
    if (predicted == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(outputs.size());
}

// Margin-bound decomposition: empirical margin error, the weighted complexity
// term (4/rho) sum_k |w_k| r_k, and a slack term (1/rho) sqrt(log l / m) with
// the order-notation constants set to 1. The slack term is diagnostic only.
struct BoundReport {
  double empirical_margin_error = 0.0;
  double complexity_term = 0.0;
  double slack_term = 0.0;
  double total = 0.0;
};

inline BoundReport deepboost_bound(const EnsembleModel& ens, const Dataset& data,
                                   const ObjectiveConfig& cfg) {
  cfg.validate();
  if (data.examples.empty()) {
    throw PreconditionError("deepboost_bound: empty dataset");
  }
  if (ens.complexity_reports.size() != ens.subnetworks.size()) {
    throw PreconditionError(
        "deepboost_bound: complexity reports missing (have " +
        std::to_string(ens.complexity_reports.size()) + ", need " +
        std::to_string(ens.subnetworks.size()) + ")");
  }
  for (std::size_t k = 0; k < ens.subnetworks.size(); ++k) {
    if (ens.complexity_reports[k].subnetwork_id != ens.subnetworks[k].id) {
      throw PreconditionError("deepboost_bound: complexity report " +
                              std::to_string(k) + " is for subnetwork '" +
                              ens.complexity_reports[k].subnetwork_id +
                              "', expected '" + ens.subnetworks[k].id + "'");
    }
  }

  BoundReport report;
  const DenseMatrix logits = ensemble_logits(ens.subnetworks, data);
  const std::vector<int> labels = dataset_labels(data);
  const std::vector<double> outputs = ensemble_outputs(logits, ens.weights);
  report.empirical_margin_error = margin_error(outputs, labels, cfg.rho);

  double weighted = 0.0;
  for (std::size_t k = 0; k < ens.subnetworks.size(); ++k) {
    weighted +=
        std::abs(ens.weights.values[k]) * ens.complexity_reports[k].value;
  }
  report.complexity_term = 4.0 / cfg.rho * weighted;

  const double l = static_cast<double>(ens.subnetworks.size());
  const double m = static_cast<double>(data.examples.size());
  report.slack_term = std::sqrt(std::log(l) / m) / cfg.rho;

  report.total = report.empirical_margin_error + report.complexity_term +
                 report.slack_term;
  return report;
}

}  // namespace autoens
