#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "autoens/complexity.hpp"
#include "autoens/dataset.hpp"
#include "autoens/subnetwork.hpp"

#include "../helpers/oracles.hpp"

using namespace autoens;

namespace {

Subnetwork constant_subnetwork(double value, std::size_t dim) {
  SubnetworkSpec spec;
  Subnetwork sn = make_subnetwork(spec, "const", dim, 0);
  std::get<LinearParams>(sn.params).bias = value;
  return sn;
}

Subnetwork linear_subnetwork(std::vector<double> weights) {
  SubnetworkSpec spec;
  Subnetwork sn = make_subnetwork(spec, "lin", weights.size(), 0);
  std::get<LinearParams>(sn.params).weights = std::move(weights);
  return sn;
}

Subnetwork random_mlp(std::size_t dim, std::size_t depth, std::uint64_t seed) {
  SubnetworkSpec spec;
  spec.family = Family::kMlp;
  spec.depth = depth;
  spec.width = 4;
  return make_subnetwork(spec, "mlp-" + std::to_string(seed), dim, seed);
}

Dataset dataset_from_rows(const std::vector<std::vector<double>>& rows) {
  Dataset d;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    d.examples.push_back({rows[i], i % 2 == 0 ? 1 : -1});
  }
  return d;
}

}  // namespace

TEST_CASE("output_variance of constant outputs is zero") {
  const Subnetwork sn = constant_subnetwork(1.0, 1);
  const Dataset data = dataset_from_rows({{0.0}, {1.0}, {2.0}});
  REQUIRE(output_variance(sn, data) == 0.0);
}

TEST_CASE("output_variance of outputs {0,2} is 1") {
  // Identity feature map: outputs equal the single feature.
  const Subnetwork sn = linear_subnetwork({1.0});
  const Dataset data = dataset_from_rows({{0.0}, {2.0}});
  REQUIRE(output_variance(sn, data) == 1.0);
}

TEST_CASE("output_variance matches the two-pass oracle") {
  const Dataset data = make_two_gaussians(40, 3, 12);
  const Subnetwork sn = random_mlp(3, 2, 31);
  const double got = output_variance(sn, data);
  const double expected = oracles::two_pass_variance(sn, data);
  REQUIRE(std::abs(got - expected) <= 1e-12);
}

TEST_CASE("output_variance rejects an empty dataset") {
  const Subnetwork sn = constant_subnetwork(0.0, 1);
  REQUIRE_THROWS_AS(output_variance(sn, Dataset{}), PreconditionError);
}

TEST_CASE("output_variance is invariant under example permutation") {
  Dataset data = make_two_gaussians(25, 2, 44);
  const Subnetwork sn = random_mlp(2, 1, 9);
  const double before = output_variance(sn, data);
  std::reverse(data.examples.begin(), data.examples.end());
  const double after = output_variance(sn, data);
  REQUIRE(std::abs(before - after) <= 1e-12);
}

TEST_CASE("jacobian_norm of a linear model is the weight norm") {
  const Subnetwork sn = linear_subnetwork({3.0, 4.0});
  const Dataset data = dataset_from_rows({{1.0, 0.0}, {0.5, -2.0}});
  REQUIRE(jacobian_norm(sn, data) == 5.0);
}

TEST_CASE("jacobian_norm of an all-zero mlp is zero") {
  SubnetworkSpec spec;
  spec.family = Family::kMlp;
  spec.depth = 1;
  spec.width = 3;
  Subnetwork sn = make_subnetwork(spec, "z", 2, 1);
  auto& p = std::get<MlpParams>(sn.params);
  for (auto& layer : p.layers) {
    for (double& v : layer.data) v = 0.0;
  }
  const Dataset data = dataset_from_rows({{1.0, 2.0}, {-1.0, 0.0}});
  REQUIRE(jacobian_norm(sn, data) == 0.0);
}

TEST_CASE("jacobian_norm rejects the stumps family") {
  SubnetworkSpec spec;
  spec.family = Family::kStumps;
  spec.num_stumps = 3;
  const Subnetwork sn = make_subnetwork(spec, "s", 2, 1);
  const Dataset data = dataset_from_rows({{1.0, 2.0}});
  REQUIRE_THROWS_AS(jacobian_norm(sn, data), UnsupportedMeasureError);
}

TEST_CASE("jacobian_norm matches finite differences on random mlps") {
  const Dataset data = make_two_gaussians(12, 3, 77);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Subnetwork sn = random_mlp(3, 1 + seed % 3, 1000 + seed);
    double fd_mean = 0.0;
    for (const Example& e : data.examples) {
      fd_mean += l2_norm(oracles::fd_input_gradient(sn, e.features));
    }
    fd_mean /= static_cast<double>(data.examples.size());
    const double got = jacobian_norm(sn, data);
    REQUIRE(std::abs(got - fd_mean) / std::max(fd_mean, 1e-12) < 1e-4);
  }
}

TEST_CASE("rademacher_proxy of a zero-weight linear model is zero") {
  const Subnetwork sn = linear_subnetwork({0.0, 0.0});
  const Dataset data = dataset_from_rows({{1.0, 1.0}});
  REQUIRE(rademacher_proxy(sn, data) == 0.0);
}

TEST_CASE("rademacher_proxy direct evaluation for a linear model") {
  // ||w|| = 5, max ||x|| = 1, m = 25 -> 5 * 1 / 5 = 1.
  const Subnetwork sn = linear_subnetwork({3.0, 4.0});
  std::vector<std::vector<double>> rows(25, std::vector<double>{0.6, 0.8});
  rows[7] = {0.0, 1.0};
  const Dataset data = dataset_from_rows(rows);
  REQUIRE(rademacher_proxy(sn, data) == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("rademacher_proxy is 2^L homogeneous in mlp layer scaling") {
  const Dataset data = make_two_gaussians(16, 2, 3);
  for (std::size_t depth : {1, 2, 3}) {
    Subnetwork sn = random_mlp(2, depth, 50 + depth);
    const double base = rademacher_proxy(sn, data);
    auto& p = std::get<MlpParams>(sn.params);
    for (auto& layer : p.layers) {
      for (double& v : layer.data) v *= 2.0;
    }
    const double doubled = rademacher_proxy(sn, data);
    const std::size_t num_layers = depth + 1;  // hidden layers plus output
    const double factor = std::pow(2.0, static_cast<double>(num_layers));
    REQUIRE(doubled == Catch::Approx(base * factor).epsilon(1e-12));
  }
}

TEST_CASE("stumps rademacher_proxy is num_stumps over sqrt(m)") {
  SubnetworkSpec spec;
  spec.family = Family::kStumps;
  spec.num_stumps = 6;
  const Subnetwork sn = make_subnetwork(spec, "s", 2, 1);
  const Dataset data = make_two_gaussians(9, 2, 2);
  REQUIRE(rademacher_proxy(sn, data) == 2.0);
}

TEST_CASE("all measures vanish for a zero-parameter subnetwork") {
  const Subnetwork sn = linear_subnetwork({0.0, 0.0});
  const Dataset data = make_two_gaussians(10, 2, 6);
  REQUIRE(output_variance(sn, data) == 0.0);
  REQUIRE(jacobian_norm(sn, data) == 0.0);
  REQUIRE(rademacher_proxy(sn, data) == 0.0);
}

TEST_CASE("measures are deterministic given params and dataset") {
  const Dataset data = make_two_gaussians(20, 3, 13);
  const Subnetwork sn = random_mlp(3, 2, 71);
  for (MeasureKind kind : {MeasureKind::kRademacherProxy,
                           MeasureKind::kOutputVariance,
                           MeasureKind::kJacobianNorm}) {
    const ComplexityMeasure measure{kind};
    const double a = complexity_value(measure, sn, data);
    const double b = complexity_value(measure, sn, data);
    REQUIRE(a == b);
    REQUIRE(a >= 0.0);
    REQUIRE(std::isfinite(a));
  }
}

TEST_CASE("complexity report carries id, measure, and sample size") {
  const Dataset data = make_two_gaussians(15, 2, 4);
  const Subnetwork sn = random_mlp(2, 1, 8);
  const auto report =
      make_complexity_report(ComplexityMeasure{MeasureKind::kOutputVariance},
                             sn, data);
  REQUIRE(report.subnetwork_id == sn.id);
  REQUIRE(report.measure_kind == MeasureKind::kOutputVariance);
  REQUIRE(report.sample_size == 15);
  REQUIRE(report.value >= 0.0);
}
