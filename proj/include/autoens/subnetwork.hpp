#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "autoens/dataset.hpp"
#include "autoens/error.hpp"
#include "autoens/matrix.hpp"
#include "autoens/rng.hpp"

#include "json.hpp"

namespace autoens {

enum class Family { kLinear, kMlp, kStumps };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::kLinear: return "linear";
    case Family::kMlp: return "mlp";
    case Family::kStumps: return "stumps";
  }
  return "unknown";
}

inline Family family_from_string(const std::string& s) {
  if (s == "linear") return Family::kLinear;
  if (s == "mlp") return Family::kMlp;
  if (s == "stumps") return Family::kStumps;
  throw DataError("unknown subnetwork family '" + s + "'");
}

enum class Activation { kTanh, kRelu };

inline std::string to_string(Activation a) {
  return a == Activation::kTanh ? "tanh" : "relu";
}

inline Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::kTanh;
  if (s == "relu") return Activation::kRelu;
  throw DataError("unknown activation '" + s + "'");
}

// Architecture coordinate of a subnetwork. A depth-0 mlp is exactly a linear
// model; that degenerate case anchors the grow generator at iteration 0.
struct SubnetworkSpec {
  Family family = Family::kLinear;
  std::size_t depth = 0;       // hidden layers (mlp only)
  std::size_t width = 1;       // units per hidden layer (mlp only)
  std::size_t num_stumps = 1;  // stumps only
  Activation activation = Activation::kTanh;  // mlp only

  void validate() const {
    if (family == Family::kMlp && depth > 0 && width < 1) {
      throw PreconditionError("mlp width must be >= 1");
    }
    if (family == Family::kStumps && num_stumps < 1) {
      throw PreconditionError("num_stumps must be >= 1");
    }
  }

  bool operator==(const SubnetworkSpec&) const = default;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["family"] = to_string(family);
    switch (family) {
      case Family::kLinear:
        break;
      case Family::kMlp:
        j["depth"] = depth;
        j["width"] = width;
        j["activation"] = to_string(activation);
        break;
      case Family::kStumps:
        j["num_stumps"] = num_stumps;
        break;
    }
    return j;
  }

  static SubnetworkSpec from_json(const nlohmann::json& j) {
    SubnetworkSpec spec;
    spec.family = family_from_string(j.at("family").get<std::string>());
    switch (spec.family) {
      case Family::kLinear:
        break;
      case Family::kMlp:
        spec.depth = j.at("depth").get<std::size_t>();
        spec.width = j.at("width").get<std::size_t>();
        spec.activation =
            activation_from_string(j.at("activation").get<std::string>());
        break;
      case Family::kStumps:
        spec.num_stumps = j.at("num_stumps").get<std::size_t>();
        break;
    }
    spec.validate();
    return spec;
  }
};

// --- Parameter containers per family ------------------------------------

struct LinearParams {
  std::vector<double> weights;
  double bias = 0.0;
};

struct MlpParams {
  // layers[i] maps activations of layer i to layer i+1; the last layer has a
  // single output unit. biases[i] has one entry per output unit of layers[i].
  std::vector<DenseMatrix> layers;
  std::vector<std::vector<double>> biases;
};

struct Stump {
  std::size_t feature = 0;
  double threshold = 0.0;
  double left_value = 0.0;   // emitted when x[feature] <= threshold
  double right_value = 0.0;  // emitted when x[feature] >  threshold
};

struct StumpsParams {
  std::vector<Stump> stumps;
};

using SubnetworkParams = std::variant<LinearParams, MlpParams, StumpsParams>;

// A trainable scalar-logit base learner. Prediction is a pure function of
// (params, x); the id keys its RNG streams, so training a given subnetwork is
// reproducible no matter which execution unit owns it.
struct Subnetwork {
  SubnetworkSpec spec;
  std::string id;
  SubnetworkParams params;
  std::size_t train_steps_done = 0;
  std::size_t input_dim = 0;
};

// --- Construction ---------------------------------------------------------

// Hidden layers use symmetric uniform init scaled by 1/sqrt(fan_in); biases
// start at zero. Linear models and depth-0 mlps start at zero so the convex
// logistic problem has a deterministic, init-free trajectory.
inline Subnetwork make_subnetwork(const SubnetworkSpec& spec, std::string id,
                                  std::size_t input_dim, std::uint64_t seed) {
  spec.validate();
  if (input_dim == 0) throw PreconditionError("input_dim must be >= 1");
  Subnetwork sn;
  sn.spec = spec;
  sn.id = std::move(id);
  sn.input_dim = input_dim;
  switch (spec.family) {
    case Family::kLinear: {
      LinearParams p;
      p.weights.assign(input_dim, 0.0);
      sn.params = std::move(p);
      break;
    }
    case Family::kMlp: {
      MlpParams p;
      if (spec.depth == 0) {
        p.layers.emplace_back(1, input_dim);
        p.biases.emplace_back(1, 0.0);
      } else {
        Rng rng = subnetwork_stream(seed, sn.id, StreamPurpose::kInit);
        std::size_t fan_in = input_dim;
        for (std::size_t layer = 0; layer < spec.depth; ++layer) {
          DenseMatrix w(spec.width, fan_in);
          const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
          for (double& v : w.data) v = rng.symmetric(scale);
          p.layers.push_back(std::move(w));
          p.biases.emplace_back(spec.width, 0.0);
          fan_in = spec.width;
        }
        DenseMatrix out(1, fan_in);
        const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (double& v : out.data) v = rng.symmetric(scale);
        p.layers.push_back(std::move(out));
        p.biases.emplace_back(1, 0.0);
      }
      sn.params = std::move(p);
      break;
    }
    case Family::kStumps:
      sn.params = StumpsParams{};
      break;
  }
  return sn;
}

// --- Prediction -----------------------------------------------------------

inline double activate(Activation a, double z) {
  return a == Activation::kTanh ? std::tanh(z) : std::max(0.0, z);
}

inline double activate_derivative(Activation a, double z) {
  if (a == Activation::kTanh) {
    const double t = std::tanh(z);
    return 1.0 - t * t;
  }
  return z > 0.0 ? 1.0 : 0.0;
}

namespace detail {

// Forward pass keeping pre-activations; needed by backprop and the analytic
// input Jacobian.
struct MlpTrace {
  std::vector<std::vector<double>> activations;     // per layer incl. input
  std::vector<std::vector<double>> pre_activations; // per layer excl. input
  double output = 0.0;
};

inline MlpTrace mlp_forward(const MlpParams& p, Activation act,
                            const std::vector<double>& x) {
  MlpTrace trace;
  trace.activations.push_back(x);
  std::vector<double> current = x;
  for (std::size_t layer = 0; layer < p.layers.size(); ++layer) {
    const DenseMatrix& w = p.layers[layer];
    const std::vector<double>& b = p.biases[layer];
    if (w.cols != current.size()) {
      throw ShapeError("mlp layer " + std::to_string(layer) + " expects " +
                       std::to_string(w.cols) + " inputs, got " +
                       std::to_string(current.size()));
    }
    std::vector<double> z(w.rows, 0.0);
    for (std::size_t r = 0; r < w.rows; ++r) {
      double acc = b[r];
      for (std::size_t c = 0; c < w.cols; ++c) acc += w.at(r, c) * current[c];
      z[r] = acc;
    }
    trace.pre_activations.push_back(z);
    const bool is_output = layer + 1 == p.layers.size();
    std::vector<double> a(z.size());
    for (std::size_t r = 0; r < z.size(); ++r) {
      a[r] = is_output ? z[r] : activate(act, z[r]);
    }
    trace.activations.push_back(a);
    current = std::move(a);
  }
  trace.output = trace.activations.back().at(0);
  return trace;
}

}  // namespace detail

inline double stump_value(const Stump& s, const std::vector<double>& x) {
  return x[s.feature] <= s.threshold ? s.left_value : s.right_value;
}

inline double predict(const Subnetwork& sn, const std::vector<double>& x) {
  if (x.size() != sn.input_dim) {
    throw ShapeError("predict: input dimension " + std::to_string(x.size()) +
                     ", subnetwork expects " + std::to_string(sn.input_dim));
  }
  switch (sn.spec.family) {
    case Family::kLinear: {
      const auto& p = std::get<LinearParams>(sn.params);
      return dot(p.weights, x) + p.bias;
    }
    case Family::kMlp:
      return detail::mlp_forward(std::get<MlpParams>(sn.params),
                                 sn.spec.activation, x)
          .output;
    case Family::kStumps: {
      const auto& p = std::get<StumpsParams>(sn.params);
      double acc = 0.0;
      for (const Stump& s : p.stumps) acc += stump_value(s, x);
      return acc;
    }
  }
  throw Error("predict: unreachable");
}

// --- Training -------------------------------------------------------------

// Numerically stable log(1 + exp(z)).
inline double softplus(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

// Mean logistic loss log(1 + exp(-y h(x))) over a batch.
inline double logistic_batch_loss(const Subnetwork& sn,
                                  const std::vector<const Example*>& batch) {
  double acc = 0.0;
  for (const Example* e : batch) {
    acc += softplus(-static_cast<double>(e->label) * predict(sn, e->features));
  }
  return acc / static_cast<double>(batch.size());
}

// dL/dh for the logistic loss at one example: -y / (1 + exp(y h)).
inline double logistic_dloss_dlogit(int label, double logit) {
  const double y = static_cast<double>(label);
  return -y / (1.0 + std::exp(y * logit));
}

namespace detail {

inline void linear_sgd_step(Subnetwork& sn,
                            const std::vector<const Example*>& batch, double lr) {
  auto& p = std::get<LinearParams>(sn.params);
  std::vector<double> grad_w(p.weights.size(), 0.0);
  double grad_b = 0.0;
  for (const Example* e : batch) {
    const double logit = dot(p.weights, e->features) + p.bias;
    const double dldh = logistic_dloss_dlogit(e->label, logit);
    for (std::size_t j = 0; j < grad_w.size(); ++j) {
      grad_w[j] += dldh * e->features[j];
    }
    grad_b += dldh;
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (std::size_t j = 0; j < grad_w.size(); ++j) {
    p.weights[j] -= lr * grad_w[j] * inv;
  }
  p.bias -= lr * grad_b * inv;
}

struct MlpGradients {
  std::vector<DenseMatrix> layers;
  std::vector<std::vector<double>> biases;
};

inline MlpGradients zero_like(const MlpParams& p) {
  MlpGradients g;
  for (const DenseMatrix& w : p.layers) g.layers.emplace_back(w.rows, w.cols);
  for (const auto& b : p.biases) g.biases.emplace_back(b.size(), 0.0);
  return g;
}

// Backprop of dL/dh through the mlp; accumulates into g.
inline void mlp_accumulate_gradients(const MlpParams& p, Activation act,
                                     const Example& e, MlpGradients& g) {
  const MlpTrace trace = mlp_forward(p, act, e.features);
  const double dldh = logistic_dloss_dlogit(e.label, trace.output);
  // delta starts at the single output unit; the output layer is affine.
  std::vector<double> delta{dldh};
  for (std::size_t layer = p.layers.size(); layer-- > 0;) {
    const DenseMatrix& w = p.layers[layer];
    const std::vector<double>& input = trace.activations[layer];
    for (std::size_t r = 0; r < w.rows; ++r) {
      g.biases[layer][r] += delta[r];
      for (std::size_t c = 0; c < w.cols; ++c) {
        g.layers[layer].at(r, c) += delta[r] * input[c];
      }
    }
    if (layer == 0) break;
    std::vector<double> prev_delta(w.cols, 0.0);
    for (std::size_t c = 0; c < w.cols; ++c) {
      double acc = 0.0;
      for (std::size_t r = 0; r < w.rows; ++r) acc += delta[r] * w.at(r, c);
      prev_delta[c] =
          acc * activate_derivative(act, trace.pre_activations[layer - 1][c]);
    }
    delta = std::move(prev_delta);
  }
}

inline void mlp_sgd_step(Subnetwork& sn, const std::vector<const Example*>& batch,
                         double lr) {
  auto& p = std::get<MlpParams>(sn.params);
  MlpGradients g = zero_like(p);
  for (const Example* e : batch) {
    mlp_accumulate_gradients(p, sn.spec.activation, *e, g);
  }
  const double scale = lr / static_cast<double>(batch.size());
  for (std::size_t layer = 0; layer < p.layers.size(); ++layer) {
    for (std::size_t i = 0; i < p.layers[layer].data.size(); ++i) {
      p.layers[layer].data[i] -= scale * g.layers[layer].data[i];
    }
    for (std::size_t i = 0; i < p.biases[layer].size(); ++i) {
      p.biases[layer][i] -= scale * g.biases[layer][i];
    }
  }
}

// Greedy least-squares stump on the gradient residuals. Splits are scanned
// exhaustively over feature/threshold midpoints; ties go to the lowest
// feature index, then the lowest threshold, so the fit is deterministic.
inline void stumps_boost_step(Subnetwork& sn,
                              const std::vector<const Example*>& batch,
                              double lr) {
  auto& p = std::get<StumpsParams>(sn.params);
  if (p.stumps.size() >= sn.spec.num_stumps) return;  // architecture is full

  const std::size_t n = batch.size();
  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double logit = predict(sn, batch[i]->features);
    residual[i] = -logistic_dloss_dlogit(batch[i]->label, logit);
  }

  double total = 0.0;
  for (double r : residual) total += r;
  const double mean_all = total / static_cast<double>(n);
  // Baseline: a constant fit (no split found for any feature).
  double best_sse = 0.0;
  for (double r : residual) best_sse += (r - mean_all) * (r - mean_all);
  bool found = false;
  Stump best;

  const std::size_t d = sn.input_dim;
  std::vector<std::pair<double, double>> column(n);  // (feature value, residual)
  for (std::size_t f = 0; f < d; ++f) {
    for (std::size_t i = 0; i < n; ++i) {
      column[i] = {batch[i]->features[f], residual[i]};
    }
    std::sort(column.begin(), column.end());
    // Prefix sums over the sorted column let each midpoint be scored in O(1).
    std::vector<double> prefix(n + 1, 0.0), prefix_sq(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      prefix[i + 1] = prefix[i] + column[i].second;
      prefix_sq[i + 1] = prefix_sq[i] + column[i].second * column[i].second;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (column[i].first == column[i + 1].first) continue;
      const double threshold = 0.5 * (column[i].first + column[i + 1].first);
      const double nl = static_cast<double>(i + 1);
      const double nr = static_cast<double>(n - i - 1);
      const double sum_l = prefix[i + 1];
      const double sum_r = prefix[n] - sum_l;
      const double sse = (prefix_sq[i + 1] - sum_l * sum_l / nl) +
                         (prefix_sq[n] - prefix_sq[i + 1] - sum_r * sum_r / nr);
      if (sse < best_sse - 1e-15) {
        best_sse = sse;
        best.feature = f;
        best.threshold = threshold;
        best.left_value = lr * sum_l / nl;
        best.right_value = lr * sum_r / nr;
        found = true;
      }
    }
  }
  if (!found) {
    // Every feature is constant in the batch; fall back to a constant stump.
    if (mean_all == 0.0) return;
    best.feature = 0;
    best.threshold = std::numeric_limits<double>::infinity();
    best.left_value = lr * mean_all;
    best.right_value = lr * mean_all;
  }
  p.stumps.push_back(best);
}

}  // namespace detail

// One training step. Linear/mlp: a single SGD step on the mean logistic loss
// with analytic gradients. Stumps: one greedy boosting stage on the gradient
// residual. Returns the batch loss measured before the update.
inline double train_step(Subnetwork& sn, const std::vector<const Example*>& batch,
                         double lr) {
  if (batch.empty()) throw PreconditionError("train_step: empty batch");
  if (!(lr > 0.0)) throw PreconditionError("train_step: lr must be > 0");
  const double loss = logistic_batch_loss(sn, batch);
  if (!std::isfinite(loss)) {
    throw TrainingError("non-finite batch loss for subnetwork " + sn.id);
  }
  switch (sn.spec.family) {
    case Family::kLinear:
      detail::linear_sgd_step(sn, batch, lr);
      break;
    case Family::kMlp:
      detail::mlp_sgd_step(sn, batch, lr);
      break;
    case Family::kStumps:
      detail::stumps_boost_step(sn, batch, lr);
      break;
  }
  ++sn.train_steps_done;
  return loss;
}

// Batch for a given (seed, subnetwork, step): indices drawn with replacement
// from a stream keyed by all three, so a resumed or relocated training run
// replays the identical batch sequence.
inline std::vector<const Example*> sample_batch(const Dataset& data,
                                                std::size_t batch_size,
                                                std::uint64_t seed,
                                                const std::string& subnetwork_id,
                                                std::size_t step) {
  if (data.examples.empty()) throw PreconditionError("sample_batch: empty dataset");
  Rng rng = subnetwork_stream(seed, subnetwork_id, StreamPurpose::kBatch, step);
  std::vector<const Example*> batch;
  batch.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    batch.push_back(&data.examples[rng.uniform_index(data.examples.size())]);
  }
  return batch;
}

// --- Architecture metadata --------------------------------------------------
// The structured document the search and cluster layers pass around: the
// spec fields plus the id. Round-trips losslessly.

inline nlohmann::json subnetwork_metadata(const Subnetwork& sn) {
  nlohmann::json j = sn.spec.to_json();
  j["id"] = sn.id;
  return j;
}

inline Subnetwork subnetwork_from_metadata(const nlohmann::json& j,
                                           std::size_t input_dim,
                                           std::uint64_t seed) {
  const SubnetworkSpec spec = SubnetworkSpec::from_json(j);
  return make_subnetwork(spec, j.at("id").get<std::string>(), input_dim, seed);
}

// --- Flat parameter encoding ----------------------------------------------
// Used by the checkpoint blob, the parameter store, and model export. The
// layout per family is fixed and documented in the README.

inline std::vector<double> flatten_params(const Subnetwork& sn) {
  std::vector<double> flat;
  switch (sn.spec.family) {
    case Family::kLinear: {
      const auto& p = std::get<LinearParams>(sn.params);
      flat = p.weights;
      flat.push_back(p.bias);
      break;
    }
    case Family::kMlp: {
      const auto& p = std::get<MlpParams>(sn.params);
      for (std::size_t layer = 0; layer < p.layers.size(); ++layer) {
        flat.insert(flat.end(), p.layers[layer].data.begin(),
                    p.layers[layer].data.end());
        flat.insert(flat.end(), p.biases[layer].begin(), p.biases[layer].end());
      }
      break;
    }
    case Family::kStumps: {
      const auto& p = std::get<StumpsParams>(sn.params);
      flat.push_back(static_cast<double>(p.stumps.size()));
      for (const Stump& s : p.stumps) {
        flat.push_back(static_cast<double>(s.feature));
        flat.push_back(s.threshold);
        flat.push_back(s.left_value);
        flat.push_back(s.right_value);
      }
      break;
    }
  }
  return flat;
}

inline void unflatten_params(Subnetwork& sn, const std::vector<double>& flat) {
  std::size_t pos = 0;
  auto take = [&](std::size_t count) {
    if (pos + count > flat.size()) {
      throw DataError("parameter blob too short for subnetwork " + sn.id);
    }
    const std::size_t start = pos;
    pos += count;
    return start;
  };
  switch (sn.spec.family) {
    case Family::kLinear: {
      LinearParams p;
      const std::size_t start = take(sn.input_dim + 1);
      p.weights.assign(flat.begin() + start, flat.begin() + start + sn.input_dim);
      p.bias = flat[start + sn.input_dim];
      sn.params = std::move(p);
      break;
    }
    case Family::kMlp: {
      MlpParams p;
      std::size_t fan_in = sn.input_dim;
      for (std::size_t layer = 0; layer <= sn.spec.depth; ++layer) {
        const bool is_output = layer == sn.spec.depth;
        const std::size_t rows = is_output ? 1 : sn.spec.width;
        DenseMatrix w(rows, fan_in);
        const std::size_t wstart = take(rows * fan_in);
        std::copy(flat.begin() + wstart, flat.begin() + wstart + rows * fan_in,
                  w.data.begin());
        const std::size_t bstart = take(rows);
        p.layers.push_back(std::move(w));
        p.biases.emplace_back(flat.begin() + bstart, flat.begin() + bstart + rows);
        fan_in = rows;
      }
      sn.params = std::move(p);
      break;
    }
    case Family::kStumps: {
      StumpsParams p;
      const std::size_t hstart = take(1);
      const auto count = static_cast<std::size_t>(flat[hstart]);
      for (std::size_t i = 0; i < count; ++i) {
        const std::size_t s = take(4);
        Stump stump;
        stump.feature = static_cast<std::size_t>(flat[s]);
        stump.threshold = flat[s + 1];
        stump.left_value = flat[s + 2];
        stump.right_value = flat[s + 3];
        p.stumps.push_back(stump);
      }
      sn.params = std::move(p);
      break;
    }
  }
  if (pos != flat.size()) {
    throw DataError("parameter blob has " + std::to_string(flat.size() - pos) +
                    " trailing values for subnetwork " + sn.id);
  }
}

}  // namespace autoens
