#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "autoens/error.hpp"
#include "autoens/matrix.hpp"

namespace autoens {

enum class SurrogateKind { kExp, kLogistic };

inline std::string to_string(SurrogateKind k) {
  return k == SurrogateKind::kExp ? "exp" : "logistic";
}

inline SurrogateKind surrogate_from_string(const std::string& s) {
  if (s == "exp") return SurrogateKind::kExp;
  if (s == "logistic") return SurrogateKind::kLogistic;
  throw ConfigError("unknown surrogate '" + s + "'");
}

// Arguments above this threshold are clamped before evaluating the surrogate,
// which keeps exp(u - 1) finite. A clamp event is reported through
// ObjectiveDiagnostics; optimization treats the clamped region as flat.
inline constexpr double kSurrogateSaturation = 500.0;

struct ObjectiveDiagnostics {
  std::size_t saturation_count = 0;
};

// Surrogate Phi evaluated at u = 1 - y f, calibrated so that the exp kind
// reproduces the AdaBoost loss exactly: Phi(u) = e^(u-1) gives
// Phi(1 - y f) = e^(-y f). The logistic kind is log2(1 + e^(u-1)), which is 1
// at zero margin as well. Both are convex and non-decreasing in u.
inline double surrogate_value(SurrogateKind kind, double u,
                              ObjectiveDiagnostics* diag = nullptr) {
  if (!std::isfinite(u)) throw PreconditionError("surrogate_value: u not finite");
  if (u > kSurrogateSaturation) {
    u = kSurrogateSaturation;
    if (diag != nullptr) ++diag->saturation_count;
  }
  switch (kind) {
    case SurrogateKind::kExp:
      return std::exp(u - 1.0);
    case SurrogateKind::kLogistic:
      // log2(1 + e^(u-1)) via the stable softplus form.
      if (u - 1.0 > 0.0) {
        return ((u - 1.0) + std::log1p(std::exp(1.0 - u))) / std::numbers::ln2;
      }
      return std::log1p(std::exp(u - 1.0)) / std::numbers::ln2;
  }
  throw Error("surrogate_value: unreachable");
}

// dPhi/du of the clamped surrogate (zero beyond the saturation threshold).
inline double surrogate_derivative(SurrogateKind kind, double u,
                                   ObjectiveDiagnostics* diag = nullptr) {
  if (!std::isfinite(u)) {
    throw PreconditionError("surrogate_derivative: u not finite");
  }
  if (u > kSurrogateSaturation) {
    if (diag != nullptr) ++diag->saturation_count;
    return 0.0;
  }
  switch (kind) {
    case SurrogateKind::kExp:
      return std::exp(u - 1.0);
    case SurrogateKind::kLogistic:
      // e^(u-1) / ((1 + e^(u-1)) ln 2), written as sigmoid(u-1) / ln 2.
      return 1.0 / ((1.0 + std::exp(1.0 - u)) * std::numbers::ln2);
  }
  throw Error("surrogate_derivative: unreachable");
}

// Mixture-weight objective configuration. rho only enters bound reporting.
struct ObjectiveConfig {
  double lambda = 0.0;  // complexity scale
  double beta = 0.0;    // flat L1 strength
  SurrogateKind surrogate = SurrogateKind::kExp;
  double rho = 0.1;             // margin for bound reporting, in (0, 1]
  std::size_t max_prox_steps = 500;
  double tol = 1e-9;

  void validate() const {
    if (!(rho > 0.0) || rho > 1.0) {
      throw PreconditionError("rho must be in (0, 1]");
    }
    if (lambda < 0.0 || beta < 0.0) {
      throw PreconditionError("lambda and beta must be >= 0");
    }
    if (!(tol > 0.0)) throw PreconditionError("tol must be > 0");
  }
};

namespace detail {

inline void check_objective_shapes(const DenseMatrix& logits,
                                   const std::vector<int>& labels,
                                   const std::vector<double>& weights,
                                   const std::vector<double>& r) {
  if (logits.rows != labels.size()) {
    throw ShapeError("objective: " + std::to_string(logits.rows) +
                     " logit rows vs " + std::to_string(labels.size()) +
                     " labels");
  }
  if (logits.cols != weights.size()) {
    throw ShapeError("objective: " + std::to_string(logits.cols) +
                     " logit columns vs " + std::to_string(weights.size()) +
                     " weights");
  }
  if (r.size() != weights.size()) {
    throw ShapeError("objective: " + std::to_string(r.size()) +
                     " complexity values vs " + std::to_string(weights.size()) +
                     " weights");
  }
}

}  // namespace detail

// Smooth empirical term: (1/m) sum_i Phi(1 - y_i sum_j w_j h_ij).
inline double smooth_empirical_value(const DenseMatrix& logits,
                                     const std::vector<int>& labels,
                                     const std::vector<double>& weights,
                                     SurrogateKind surrogate,
                                     ObjectiveDiagnostics* diag = nullptr) {
  double acc = 0.0;
  for (std::size_t i = 0; i < logits.rows; ++i) {
    double f = 0.0;
    for (std::size_t j = 0; j < logits.cols; ++j) {
      f += weights[j] * logits.at(i, j);
    }
    acc += surrogate_value(surrogate,
                           1.0 - static_cast<double>(labels[i]) * f, diag);
  }
  return acc / static_cast<double>(logits.rows);
}

// Gradient of the smooth empirical term:
// g_j = (1/m) sum_i Phi'(u_i) * (-y_i h_ij).
inline std::vector<double> smooth_empirical_gradient(
    const DenseMatrix& logits, const std::vector<int>& labels,
    const std::vector<double>& weights, SurrogateKind surrogate,
    ObjectiveDiagnostics* diag = nullptr) {
  std::vector<double> grad(logits.cols, 0.0);
  for (std::size_t i = 0; i < logits.rows; ++i) {
    const double y = static_cast<double>(labels[i]);
    double f = 0.0;
    for (std::size_t j = 0; j < logits.cols; ++j) {
      f += weights[j] * logits.at(i, j);
    }
    const double dphi = surrogate_derivative(surrogate, 1.0 - y * f, diag);
    for (std::size_t j = 0; j < logits.cols; ++j) {
      grad[j] += dphi * (-y) * logits.at(i, j);
    }
  }
  const double inv_m = 1.0 / static_cast<double>(logits.rows);
  for (double& g : grad) g *= inv_m;
  return grad;
}

// L1 penalty sum_j (lambda r_j + beta) |w_j|.
inline double penalty_value(const std::vector<double>& weights,
                            const std::vector<double>& r,
                            const ObjectiveConfig& cfg) {
  double acc = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    acc += (cfg.lambda * r[j] + cfg.beta) * std::abs(weights[j]);
  }
  return acc;
}

// Full mixture-weight objective: empirical term plus complexity penalty.
inline double objective(const std::vector<double>& weights,
                        const DenseMatrix& logits,
                        const std::vector<int>& labels,
                        const ObjectiveConfig& cfg, const std::vector<double>& r,
                        ObjectiveDiagnostics* diag = nullptr) {
  detail::check_objective_shapes(logits, labels, weights, r);
  return smooth_empirical_value(logits, labels, weights, cfg.surrogate, diag) +
         penalty_value(weights, r, cfg);
}

// Soft-thresholding, the proximal operator of t * c * |.|.
inline double soft_threshold(double value, double threshold) {
  if (value > threshold) return value - threshold;
  if (value < -threshold) return value + threshold;
  return 0.0;
}

struct FitResult {
  std::vector<double> weights;
  std::vector<double> trace;  // objective after each accepted step, F(w0) first
  ObjectiveDiagnostics diagnostics;
};

// Proximal-gradient descent on the objective: gradient step on the smooth
// empirical term, then per-coordinate soft-thresholding with threshold
// step * (lambda r_j + beta). The step size is found by halving until the
// quadratic upper-bound condition holds, which makes every accepted step
// non-increasing in F. Stops when |dF| <= tol or max_prox_steps is hit.
inline FitResult fit_mixture_weights(const DenseMatrix& logits,
                                     const std::vector<int>& labels,
                                     const ObjectiveConfig& cfg,
                                     const std::vector<double>& r,
                                     std::vector<double> w0) {
  cfg.validate();
  detail::check_objective_shapes(logits, labels, w0, r);
  FitResult result;
  ObjectiveDiagnostics* diag = &result.diagnostics;

  std::vector<double> w = std::move(w0);
  double smooth = smooth_empirical_value(logits, labels, w, cfg.surrogate, diag);
  double current = smooth + penalty_value(w, r, cfg);
  if (!std::isfinite(current)) {
    throw OptimizationError("objective not finite at starting weights");
  }
  result.trace.push_back(current);

  double step = 1.0;
  constexpr int kMaxHalvings = 80;

  for (std::size_t iter = 0; iter < cfg.max_prox_steps; ++iter) {
    const std::vector<double> grad =
        smooth_empirical_gradient(logits, labels, w, cfg.surrogate, diag);
    for (double g : grad) {
      if (!std::isfinite(g)) {
        throw OptimizationError("non-finite gradient in weight fit");
      }
    }

    std::vector<double> proposal(w.size());
    double proposal_smooth = 0.0;
    bool accepted = false;
    for (int halving = 0; halving < kMaxHalvings; ++halving) {
      for (std::size_t j = 0; j < w.size(); ++j) {
        proposal[j] = soft_threshold(w[j] - step * grad[j],
                                     step * (cfg.lambda * r[j] + cfg.beta));
      }
      proposal_smooth =
          smooth_empirical_value(logits, labels, proposal, cfg.surrogate, diag);
      double linear = 0.0;
      double quadratic = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j) {
        const double d = proposal[j] - w[j];
        linear += grad[j] * d;
        quadratic += d * d;
      }
      if (proposal_smooth <= smooth + linear + quadratic / (2.0 * step)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // step underflow: no usable descent direction left

    const double next = proposal_smooth + penalty_value(proposal, r, cfg);
    const double delta = current - next;
    w = proposal;
    smooth = proposal_smooth;
    current = next;
    result.trace.push_back(current);
    if (std::abs(delta) <= cfg.tol) break;
  }

  result.weights = std::move(w);
  return result;
}

}  // namespace autoens
