#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "autoens/dataset.hpp"
#include "autoens/ensemble.hpp"
#include "autoens/finite_diff.hpp"
#include "autoens/objective.hpp"

#include "../helpers/oracles.hpp"

using namespace autoens;

namespace {

struct RandomInstance {
  DenseMatrix logits;
  std::vector<int> labels;
  std::vector<double> r;
  std::vector<double> w;
};

RandomInstance random_instance(Rng& rng, std::size_t max_m = 50,
                               std::size_t max_n = 5) {
  RandomInstance inst;
  const std::size_t m = 1 + rng.uniform_index(max_m);
  const std::size_t n = 1 + rng.uniform_index(max_n);
  inst.logits = DenseMatrix(m, n);
  for (double& v : inst.logits.data) v = rng.symmetric(2.0);
  inst.labels.resize(m);
  for (int& y : inst.labels) y = rng.uniform() < 0.5 ? -1 : 1;
  inst.r.resize(n);
  for (double& v : inst.r) v = rng.uniform();
  inst.w.resize(n);
  for (double& v : inst.w) v = rng.symmetric(1.0);
  return inst;
}

}  // namespace

TEST_CASE("uniform_weights") {
  const auto w4 = uniform_weights(4);
  REQUIRE(w4.values == std::vector<double>{0.25, 0.25, 0.25, 0.25});
  REQUIRE(uniform_weights(1).values == std::vector<double>{1.0});
  const auto w3 = uniform_weights(3);
  double sum = 0.0;
  for (double v : w3.values) sum += v;
  REQUIRE(std::abs(sum - 1.0) <= 1e-15);
  REQUIRE(w3.l1_norm() <= 1.0 + 1e-15);
  REQUIRE_THROWS_AS(uniform_weights(0), PreconditionError);
}

TEST_CASE("surrogate values at the calibration points") {
  // Margin y f = 1 means u = 0; the exp surrogate reproduces e^{-1}.
  REQUIRE(surrogate_value(SurrogateKind::kExp, 0.0) ==
          Catch::Approx(0.36787944117144233).margin(1e-16));
  REQUIRE(surrogate_value(SurrogateKind::kExp, 1.0) == 1.0);
  REQUIRE(surrogate_value(SurrogateKind::kLogistic, 1.0) ==
          Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("surrogates are convex and non-decreasing in u") {
  for (SurrogateKind kind : {SurrogateKind::kExp, SurrogateKind::kLogistic}) {
    double prev = surrogate_value(kind, -10.0);
    double prev_slope = 0.0;
    bool first = true;
    for (double u = -9.5; u <= 10.0; u += 0.5) {
      const double value = surrogate_value(kind, u);
      REQUIRE(value >= prev);
      const double slope = value - prev;
      if (!first) REQUIRE(slope >= prev_slope - 1e-12);
      prev_slope = slope;
      prev = value;
      first = false;
    }
  }
}

TEST_CASE("surrogate saturates above the documented cap") {
  ObjectiveDiagnostics diag;
  const double capped = surrogate_value(SurrogateKind::kExp,
                                        kSurrogateSaturation + 100.0, &diag);
  REQUIRE(capped == surrogate_value(SurrogateKind::kExp, kSurrogateSaturation));
  REQUIRE(std::isfinite(capped));
  REQUIRE(diag.saturation_count == 1);
}

TEST_CASE("objective hand example") {
  // m=1, N=1, y h = 1, w = 1, lambda = 0, beta = 0.1, exp surrogate.
  DenseMatrix logits(1, 1, {1.0});
  std::vector<int> labels{1};
  ObjectiveConfig cfg;
  cfg.beta = 0.1;
  const double f = objective({1.0}, logits, labels, cfg, {0.0});
  REQUIRE(f == Catch::Approx(0.46787944117144233).margin(1e-15));
}

TEST_CASE("objective at zero weights is Phi(1)") {
  Rng rng(8);
  auto inst = random_instance(rng);
  ObjectiveConfig cfg;
  cfg.lambda = 0.3;
  cfg.beta = 0.2;
  std::vector<double> zero(inst.logits.cols, 0.0);
  REQUIRE(objective(zero, inst.logits, inst.labels, cfg, inst.r) ==
          Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("objective matches the term-by-term oracle") {
  Rng rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    auto inst = random_instance(rng);
    ObjectiveConfig cfg;
    cfg.lambda = rng.uniform();
    cfg.beta = rng.uniform();
    cfg.surrogate =
        trial % 2 == 0 ? SurrogateKind::kExp : SurrogateKind::kLogistic;
    const double got = objective(inst.w, inst.logits, inst.labels, cfg, inst.r);
    const double expected =
        oracles::objective_term_by_term(inst.w, inst.logits, inst.labels, cfg,
                                        inst.r);
    REQUIRE(std::abs(got - expected) <= 1e-12);
  }
}

TEST_CASE("objective rejects shape mismatches") {
  DenseMatrix logits(2, 3);
  std::vector<int> labels{1, -1};
  ObjectiveConfig cfg;
  REQUIRE_THROWS_AS(objective({1.0, 2.0}, logits, labels, cfg, {0.0, 0.0, 0.0}),
                    ShapeError);
  REQUIRE_THROWS_AS(
      objective({1.0, 2.0, 3.0}, logits, labels, cfg, {0.0, 0.0}), ShapeError);
}

TEST_CASE("smooth gradient matches finite differences") {
  Rng rng(456);
  for (int trial = 0; trial < 10; ++trial) {
    auto inst = random_instance(rng);
    const SurrogateKind kind =
        trial % 2 == 0 ? SurrogateKind::kExp : SurrogateKind::kLogistic;
    const auto analytic = smooth_empirical_gradient(inst.logits, inst.labels,
                                                    inst.w, kind);
    auto value_at = [&](const std::vector<double>& w) {
      return smooth_empirical_value(inst.logits, inst.labels, w, kind);
    };
    const auto fd = finite_diff_gradient(value_at, inst.w, 1e-6);
    for (std::size_t j = 0; j < fd.size(); ++j) {
      const double scale = std::max(std::abs(fd[j]), 1e-8);
      REQUIRE(std::abs(fd[j] - analytic[j]) / scale < 1e-6);
    }
  }
}

TEST_CASE("soft_threshold unit cases") {
  REQUIRE(soft_threshold(0.5, 0.2) == Catch::Approx(0.3).margin(1e-16));
  REQUIRE(soft_threshold(-0.1, 0.2) == 0.0);
  REQUIRE(soft_threshold(-0.5, 0.2) == Catch::Approx(-0.3).margin(1e-16));
  REQUIRE(soft_threshold(0.2, 0.2) == 0.0);
}

TEST_CASE("fit_mixture_weights excludes a subnetwork with huge complexity") {
  Rng rng(9);
  auto inst = random_instance(rng, 20, 1);
  ObjectiveConfig cfg;
  cfg.lambda = 1.0;
  cfg.beta = 0.0;
  std::vector<double> r{1e6};  // threshold dwarfs any smooth gradient
  const auto fit =
      fit_mixture_weights(inst.logits, inst.labels, cfg, r, {0.0});
  REQUIRE(fit.weights == std::vector<double>{0.0});
}

TEST_CASE("unregularized single-subnetwork fit approaches the grid optimum") {
  // Separable margins: y h > 0 for every example.
  DenseMatrix logits(6, 1, {0.8, 1.2, 0.6, 1.0, 0.9, 1.1});
  std::vector<int> labels{1, 1, 1, 1, 1, 1};
  ObjectiveConfig cfg;
  cfg.surrogate = SurrogateKind::kLogistic;
  cfg.max_prox_steps = 4000;
  cfg.tol = 1e-13;
  std::vector<double> r{0.0};

  SECTION("with a small L1 pull the optimum is finite and matched") {
    cfg.beta = 0.05;
    const auto fit = fit_mixture_weights(logits, labels, cfg, r, {0.0});
    const double grid = oracles::grid_search_scalar_weight(
        logits, labels, cfg, r, 0.0, 20.0, 200000);
    REQUIRE(std::abs(fit.weights[0] - grid) < 1e-3);
    // F strictly decreases from the start.
    REQUIRE(fit.trace.back() < fit.trace.front());
  }

  SECTION("with no penalty the weight grows and F decreases monotonically") {
    cfg.beta = 0.0;
    cfg.max_prox_steps = 200;
    const auto fit = fit_mixture_weights(logits, labels, cfg, r, {0.0});
    REQUIRE(fit.weights[0] > 1.0);
    for (std::size_t i = 1; i < fit.trace.size(); ++i) {
      REQUIRE(fit.trace[i] <= fit.trace[i - 1] + 1e-12);
    }
  }
}

TEST_CASE("fit trace is non-increasing on random problems") {
  Rng rng(321);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = random_instance(rng);
    ObjectiveConfig cfg;
    cfg.lambda = rng.uniform() * 0.1;
    cfg.beta = rng.uniform() * 0.1;
    cfg.surrogate =
        trial % 2 == 0 ? SurrogateKind::kExp : SurrogateKind::kLogistic;
    std::vector<double> w0(inst.logits.cols, 0.0);
    const auto fit =
        fit_mixture_weights(inst.logits, inst.labels, cfg, inst.r, w0);
    for (std::size_t i = 1; i < fit.trace.size(); ++i) {
      REQUIRE(fit.trace[i] <= fit.trace[i - 1] + 1e-12);
    }
    // F(final) <= F(w0) always.
    REQUIRE(fit.trace.back() <= fit.trace.front() + 1e-12);
  }
}

TEST_CASE("beta above the max gradient magnitude yields the zero vector") {
  Rng rng(654);
  auto inst = random_instance(rng);
  ObjectiveConfig cfg;
  std::vector<double> zero(inst.logits.cols, 0.0);
  const auto grad0 = smooth_empirical_gradient(inst.logits, inst.labels, zero,
                                               cfg.surrogate);
  double max_mag = 0.0;
  for (double g : grad0) max_mag = std::max(max_mag, std::abs(g));
  cfg.beta = max_mag * 4.0 + 1.0;
  const auto fit =
      fit_mixture_weights(inst.logits, inst.labels, cfg, inst.r, zero);
  for (double w : fit.weights) REQUIRE(w == 0.0);
}

TEST_CASE("margin_error counts margins at or below rho") {
  // Outputs paired with +1 labels so margins equal outputs.
  std::vector<double> outputs{0.5, -0.2, 0.05};
  std::vector<int> labels{1, 1, 1};
  REQUIRE(margin_error(outputs, labels, 0.1) == Catch::Approx(2.0 / 3.0));
  REQUIRE(margin_error({0.5, 0.9}, {1, 1}, 0.1) == 0.0);
  // rho = 1 with all |f| <= 1 and every prediction wrong.
  REQUIRE(margin_error({0.4, -0.3}, {-1, 1}, 1.0) == 1.0);
  REQUIRE_THROWS_AS(margin_error(outputs, labels, 0.0), PreconditionError);
}

TEST_CASE("predict_ensemble basics") {
  Dataset data = make_two_gaussians(6, 2, 91);
  SubnetworkSpec spec;
  EnsembleModel single;
  single.subnetworks.push_back(make_subnetwork(spec, "a", 2, 1));
  std::get<LinearParams>(single.subnetworks[0].params).bias = 0.7;
  single.weights.values = {1.0};
  REQUIRE(predict_ensemble(single, data.examples[0].features) == 0.7);

  EnsembleModel pair;
  pair.subnetworks.push_back(make_subnetwork(spec, "p", 2, 1));
  pair.subnetworks.push_back(make_subnetwork(spec, "n", 2, 1));
  std::get<LinearParams>(pair.subnetworks[0].params).bias = 1.0;
  std::get<LinearParams>(pair.subnetworks[1].params).bias = -1.0;
  pair.weights.values = {0.5, 0.5};
  REQUIRE(predict_ensemble(pair, data.examples[0].features) == 0.0);
}

TEST_CASE("predict_ensemble equals the explicit loop oracle bit-exactly") {
  Rng rng(77);
  Dataset data = make_two_gaussians(10, 3, 5);
  EnsembleModel ens;
  for (int k = 0; k < 4; ++k) {
    SubnetworkSpec spec;
    spec.family = Family::kMlp;
    spec.depth = 1 + k % 2;
    spec.width = 3;
    ens.subnetworks.push_back(
        make_subnetwork(spec, "e" + std::to_string(k), 3, 300 + k));
    ens.weights.values.push_back(rng.symmetric(1.0));
  }
  for (const Example& e : data.examples) {
    double expected = 0.0;
    for (std::size_t k = 0; k < ens.subnetworks.size(); ++k) {
      expected += ens.weights.values[k] * predict(ens.subnetworks[k], e.features);
    }
    REQUIRE(predict_ensemble(ens, e.features) == expected);
  }
}

TEST_CASE("deepboost_bound structure") {
  const Dataset data = make_two_gaussians(50, 2, 17);
  ObjectiveConfig cfg;
  cfg.rho = 0.2;

  SubnetworkSpec spec;
  EnsembleModel ens;
  ens.subnetworks.push_back(make_subnetwork(spec, "b0", 2, 3));
  ens.weights.values = {1.0};

  SECTION("missing complexity reports are rejected") {
    REQUIRE_THROWS_AS(deepboost_bound(ens, data, cfg), PreconditionError);
  }

  SECTION("single subnetwork with zero complexity has total = margin error") {
    ens.complexity_reports.push_back({"b0", MeasureKind::kRademacherProxy, 0.0,
                                      data.examples.size()});
    const auto report = deepboost_bound(ens, data, cfg);
    REQUIRE(report.complexity_term == 0.0);
    REQUIRE(report.slack_term == 0.0);  // log 1 = 0
    REQUIRE(report.total == report.empirical_margin_error);
  }

  SECTION("zero weights zero the complexity term; doubling weights doubles it") {
    ens.subnetworks.push_back(make_subnetwork(spec, "b1", 2, 4));
    ens.complexity_reports.push_back({"b0", MeasureKind::kRademacherProxy, 0.5,
                                      data.examples.size()});
    ens.complexity_reports.push_back({"b1", MeasureKind::kRademacherProxy, 1.5,
                                      data.examples.size()});

    ens.weights.values = {0.0, 0.0};
    REQUIRE(deepboost_bound(ens, data, cfg).complexity_term == 0.0);

    ens.weights.values = {0.3, -0.2};
    const double base = deepboost_bound(ens, data, cfg).complexity_term;
    ens.weights.values = {0.6, -0.4};
    const double doubled = deepboost_bound(ens, data, cfg).complexity_term;
    REQUIRE(doubled == Catch::Approx(2.0 * base).epsilon(1e-14));
  }

  SECTION("total dominates the empirical margin error") {
    ens.complexity_reports.push_back({"b0", MeasureKind::kRademacherProxy, 0.8,
                                      data.examples.size()});
    const auto report = deepboost_bound(ens, data, cfg);
    REQUIRE(report.total >= report.empirical_margin_error);
    REQUIRE(report.complexity_term >= 0.0);
    REQUIRE(report.slack_term >= 0.0);
  }
}
