#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "autoens/dataset.hpp"
#include "autoens/error.hpp"
#include "autoens/matrix.hpp"
#include "autoens/subnetwork.hpp"

namespace autoens {

enum class MeasureKind { kRademacherProxy, kOutputVariance, kJacobianNorm };

inline std::string to_string(MeasureKind k) {
  switch (k) {
    case MeasureKind::kRademacherProxy: return "rademacher_proxy";
    case MeasureKind::kOutputVariance: return "output_variance";
    case MeasureKind::kJacobianNorm: return "jacobian_norm";
  }
  return "unknown";
}

inline MeasureKind measure_from_string(const std::string& s) {
  if (s == "rademacher_proxy") return MeasureKind::kRademacherProxy;
  if (s == "output_variance") return MeasureKind::kOutputVariance;
  if (s == "jacobian_norm") return MeasureKind::kJacobianNorm;
  throw ConfigError("unknown complexity measure '" + s + "'");
}

struct ComplexityMeasure {
  MeasureKind kind = MeasureKind::kRademacherProxy;
};

// One complexity evaluation, as appended to the metrics CSV.
struct ComplexityReport {
  std::string subnetwork_id;
  MeasureKind measure_kind = MeasureKind::kRademacherProxy;
  double value = 0.0;
  std::size_t sample_size = 0;
};

// Population variance of the subnetwork's logits over the dataset, computed
// in two passes with fixed accumulation order.
inline double output_variance(const Subnetwork& sn, const Dataset& data) {
  if (data.examples.empty()) {
    throw PreconditionError("output_variance: empty dataset");
  }
  const double m = static_cast<double>(data.examples.size());
  double mean = 0.0;
  std::vector<double> outputs;
  outputs.reserve(data.examples.size());
  for (const Example& e : data.examples) {
    const double h = predict(sn, e.features);
    outputs.push_back(h);
    mean += h;
  }
  mean /= m;
  double variance = 0.0;
  for (double h : outputs) {
    const double d = h - mean;
    variance += d * d;
  }
  return variance / m;
}

// Analytic gradient of the scalar logit with respect to the input. For the
// single-logit head the Jacobian is a 1 x d matrix, so its Frobenius norm is
// the Euclidean norm of this vector.
inline std::vector<double> input_gradient(const Subnetwork& sn,
                                          const std::vector<double>& x) {
  switch (sn.spec.family) {
    case Family::kLinear:
      return std::get<LinearParams>(sn.params).weights;
    case Family::kMlp: {
      const auto& p = std::get<MlpParams>(sn.params);
      const detail::MlpTrace trace =
          detail::mlp_forward(p, sn.spec.activation, x);
      std::vector<double> delta{1.0};
      for (std::size_t layer = p.layers.size(); layer-- > 0;) {
        const DenseMatrix& w = p.layers[layer];
        std::vector<double> prev(w.cols, 0.0);
        for (std::size_t c = 0; c < w.cols; ++c) {
          double acc = 0.0;
          for (std::size_t r = 0; r < w.rows; ++r) acc += delta[r] * w.at(r, c);
          prev[c] = acc;
        }
        if (layer > 0) {
          for (std::size_t c = 0; c < w.cols; ++c) {
            prev[c] *= activate_derivative(sn.spec.activation,
                                           trace.pre_activations[layer - 1][c]);
          }
        }
        delta = std::move(prev);
      }
      return delta;
    }
    case Family::kStumps:
      throw UnsupportedMeasureError(
          "input gradient undefined for the stumps family");
  }
  throw Error("input_gradient: unreachable");
}

// Mean Frobenius norm of the logit/input Jacobian over the dataset.
inline double jacobian_norm(const Subnetwork& sn, const Dataset& data) {
  if (data.examples.empty()) {
    throw PreconditionError("jacobian_norm: empty dataset");
  }
  if (sn.spec.family == Family::kStumps) {
    throw UnsupportedMeasureError(
        "jacobian_norm requires a differentiable family, got stumps");
  }
  double acc = 0.0;
  for (const Example& e : data.examples) {
    acc += l2_norm(input_gradient(sn, e.features));
  }
  return acc / static_cast<double>(data.examples.size());
}

// Norm-product capacity proxy: ||w||_2 * max_j ||x_j||_2 / sqrt(m) for linear
// models, the product of layer Frobenius norms in place of ||w||_2 for mlps,
// and num_stumps / sqrt(m) for stump ensembles.
inline double rademacher_proxy(const Subnetwork& sn, const Dataset& data) {
  if (data.examples.empty()) {
    throw PreconditionError("rademacher_proxy: empty dataset");
  }
  const double sqrt_m = std::sqrt(static_cast<double>(data.examples.size()));
  switch (sn.spec.family) {
    case Family::kLinear:
    case Family::kMlp: {
      double norm_product = 1.0;
      if (sn.spec.family == Family::kLinear) {
        norm_product = l2_norm(std::get<LinearParams>(sn.params).weights);
      } else {
        for (const DenseMatrix& w : std::get<MlpParams>(sn.params).layers) {
          norm_product *= w.frobenius_norm();
        }
      }
      double max_input_norm = 0.0;
      for (const Example& e : data.examples) {
        max_input_norm = std::max(max_input_norm, l2_norm(e.features));
      }
      return norm_product * max_input_norm / sqrt_m;
    }
    case Family::kStumps:
      return static_cast<double>(sn.spec.num_stumps) / sqrt_m;
  }
  throw Error("rademacher_proxy: unreachable");
}

inline double complexity_value(const ComplexityMeasure& measure,
                               const Subnetwork& sn, const Dataset& data) {
  switch (measure.kind) {
    case MeasureKind::kRademacherProxy: return rademacher_proxy(sn, data);
    case MeasureKind::kOutputVariance: return output_variance(sn, data);
    case MeasureKind::kJacobianNorm: return jacobian_norm(sn, data);
  }
  throw Error("complexity_value: unreachable");
}

inline ComplexityReport make_complexity_report(const ComplexityMeasure& measure,
                                               const Subnetwork& sn,
                                               const Dataset& data) {
  ComplexityReport report;
  report.subnetwork_id = sn.id;
  report.measure_kind = measure.kind;
  report.value = complexity_value(measure, sn, data);
  report.sample_size = data.examples.size();
  return report;
}

}  // namespace autoens
