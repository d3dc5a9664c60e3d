// Independent reference implementations used as test oracles. Everything in
// this header is deliberately written the straightforward way, separate from
// the library code paths it checks.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "autoens/dataset.hpp"
#include "autoens/matrix.hpp"
#include "autoens/objective.hpp"
#include "autoens/subnetwork.hpp"

namespace oracles {

// Naive triple-loop matrix product.
inline autoens::DenseMatrix naive_matmul(const autoens::DenseMatrix& a,
                                         const autoens::DenseMatrix& b) {
  autoens::DenseMatrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t k = 0; k < a.cols; ++k) {
      for (std::size_t j = 0; j < b.cols; ++j) {
        out.at(i, j) += a.at(i, k) * b.at(k, j);
      }
    }
  }
  return out;
}

// Textbook two-pass variance over subnetwork outputs.
inline double two_pass_variance(const autoens::Subnetwork& sn,
                                const autoens::Dataset& data) {
  double sum = 0.0;
  for (const auto& e : data.examples) sum += autoens::predict(sn, e.features);
  const double mean = sum / static_cast<double>(data.examples.size());
  double acc = 0.0;
  for (const auto& e : data.examples) {
    const double d = autoens::predict(sn, e.features) - mean;
    acc += d * d;
  }
  return acc / static_cast<double>(data.examples.size());
}

// Central-difference gradient of the logit with respect to the input.
inline std::vector<double> fd_input_gradient(const autoens::Subnetwork& sn,
                                             std::vector<double> x,
                                             double eps = 1e-6) {
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + eps;
    const double up = autoens::predict(sn, x);
    x[i] = saved - eps;
    const double down = autoens::predict(sn, x);
    x[i] = saved;
    grad[i] = (up - down) / (2.0 * eps);
  }
  return grad;
}

// Term-by-term re-evaluation of the mixture objective, summed in the same
// mathematical form but through an independent code path.
inline double objective_term_by_term(const std::vector<double>& w,
                                     const autoens::DenseMatrix& logits,
                                     const std::vector<int>& labels,
                                     const autoens::ObjectiveConfig& cfg,
                                     const std::vector<double>& r) {
  const std::size_t m = logits.rows;
  const std::size_t n = logits.cols;
  double empirical = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double f = 0.0;
    for (std::size_t j = 0; j < n; ++j) f += w[j] * logits.at(i, j);
    const double u = 1.0 - labels[i] * f;
    if (cfg.surrogate == autoens::SurrogateKind::kExp) {
      empirical += std::exp(u - 1.0);
    } else {
      empirical += std::log2(1.0 + std::exp(u - 1.0));
    }
  }
  empirical /= static_cast<double>(m);
  double penalty = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    penalty += (cfg.lambda * r[j] + cfg.beta) * std::abs(w[j]);
  }
  return empirical + penalty;
}

// Dense grid search for the best scalar weight of a one-subnetwork ensemble.
inline double grid_search_scalar_weight(const autoens::DenseMatrix& logits,
                                        const std::vector<int>& labels,
                                        const autoens::ObjectiveConfig& cfg,
                                        const std::vector<double>& r,
                                        double lo, double hi, std::size_t steps) {
  double best_w = lo;
  double best_f = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= steps; ++i) {
    const double w = lo + (hi - lo) * static_cast<double>(i) / steps;
    const double f = objective_term_by_term({w}, logits, labels, cfg, r);
    if (f < best_f) {
      best_f = f;
      best_w = w;
    }
  }
  return best_w;
}

}  // namespace oracles
