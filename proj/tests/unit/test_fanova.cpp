#include "houses/fanova.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "houses/errors.hpp"
#include "houses/gp.hpp"
#include "oracles.hpp"

using namespace houses;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("grid and point set") {
  const auto g = fanova_grid(4);
  CHECK(g == std::vector<double>{0.125, 0.375, 0.625, 0.875});
  const Eigen::MatrixXd P = scrambled_sobol(3, 256, 1);
  CHECK(P.rows() == 256);
  CHECK(P.cols() == 3);
  CHECK(P.minCoeff() >= 0.0);
  CHECK(P.maxCoeff() < 1.0);
  CHECK(P == scrambled_sobol(3, 256, 1));
  CHECK(P != scrambled_sobol(3, 256, 2));
  // Low discrepancy: every 1-D projection hits each of 16 bins exactly 16 times.
  for (int d = 0; d < 3; ++d) {
    std::vector<int> bins(16, 0);
    for (int i = 0; i < 256; ++i) ++bins[static_cast<int>(P(i, d) * 16)];
    for (int b : bins) CHECK(b == 16);
  }
}

TEST_CASE("marginal curves of simple functions") {
  const FanovaOptions opts;
  const double tol = 2.0 / std::sqrt(static_cast<double>(opts.mc_samples));

  const MarginalCurve c0 = marginal_curve([](std::span<const double>) { return 3.0; }, 2, 0, opts);
  for (double v : c0.values) CHECK(std::abs(v) <= 1e-12);

  const MarginalCurve c1 = marginal_curve([](std::span<const double> x) { return x[0]; }, 2, 0, opts);
  REQUIRE(c1.grid.size() == opts.grid_size);
  for (std::size_t i = 0; i < c1.grid.size(); ++i) CHECK(std::abs(c1.values[i] - (c1.grid[i] - 0.5)) <= tol);

  const MarginalCurve c2 = marginal_curve([](std::span<const double> x) { return x[0] * x[1]; }, 2, 0, opts);
  for (std::size_t i = 0; i < c2.grid.size(); ++i) CHECK(std::abs(c2.values[i] - (0.5 * c2.grid[i] - 0.25)) <= tol);

  for (std::size_t i = 1; i < c2.grid.size(); ++i) CHECK(c2.grid[i] > c2.grid[i - 1]);
  CHECK_THROWS_AS(marginal_curve([](std::span<const double>) { return 0.0; }, 2, 2, opts), ArgumentError);
  CHECK_THROWS_AS(marginal_curve([](std::span<const double>) { return 0.0; }, 2, 0, {1, 512, 0}), ArgumentError);
  CHECK_THROWS_AS(marginal_curve([](std::span<const double>) { return 0.0; }, 2, 0, {20, 0, 0}), ArgumentError);
}

TEST_CASE("importance of closed-form functions") {
  const auto r1 = importance([](std::span<const double> x) { return x[0]; }, 2);
  CHECK(r1.importances[0] >= 0.98);
  CHECK(r1.importances[1] <= 0.02);

  // Var(x^2) = 4/45 under the uniform measure, so I = (4/45, 16/45) / (20/45).
  const auto r2 = importance([](std::span<const double> x) { return x[0] * x[0] + 2 * x[1] * x[1]; }, 2);
  CHECK(std::abs(r2.importances[0] - 0.2) <= 0.02);
  CHECK(std::abs(r2.importances[1] - 0.8) <= 0.02);
  CHECK(std::abs(r2.variances[0] - 4.0 / 45.0) <= 0.01);
  CHECK(std::abs(r2.variances[1] - 16.0 / 45.0) <= 0.02);
  CHECK(r2.total_variance == doctest::Approx(sum(r2.variances)));

  const auto r3 = importance([](std::span<const double>) { return 1.0; }, 2);
  CHECK(r3.importances == std::vector<double>{0.5, 0.5});
}

TEST_CASE("importance invariants") {
  auto f = [](std::span<const double> x) { return std::sin(3 * x[0]) + x[1] * x[2] + 0.1 * x[3]; };
  const auto base = importance(f, 4);
  CHECK(sum(base.importances) == doctest::Approx(1.0).epsilon(1e-14));
  for (double I : base.importances) {
    CHECK(I >= 0.0);
    CHECK(I <= 1.0);
  }

  // Relabel dimensions (0 1 2 3) -> (3 0 1 2).
  auto g = [&](std::span<const double> y) {
    const double x[] = {y[1], y[2], y[3], y[0]};
    return f(x);
  };
  const auto perm = importance(g, 4);
  const std::size_t where[] = {1, 2, 3, 0};
  for (std::size_t d = 0; d < 4; ++d) CHECK(std::abs(perm.importances[where[d]] - base.importances[d]) <= 0.02);

  const auto scaled = importance([&](std::span<const double> x) { return -7.5 * f(x); }, 4);
  for (std::size_t d = 0; d < 4; ++d) CHECK(scaled.importances[d] == doctest::Approx(base.importances[d]).epsilon(1e-10));

  auto q = [](std::span<const double> x) { return x[0] * x[0] + 2 * x[1] * x[1]; };
  const auto n512 = importance(q, 2, {20, 512, 4});
  const auto n1024 = importance(q, 2, {20, 1024, 4});
  for (std::size_t d = 0; d < 2; ++d) CHECK(std::abs(n512.importances[d] - n1024.importances[d]) <= 0.05);
}

TEST_CASE("GP fast path agrees with the generic estimator") {
  std::mt19937_64 gen(31);
  for (KernelKind kind : {KernelKind::ard_se, KernelKind::relative_distance, KernelKind::houses}) {
    CAPTURE(to_string(kind));
    const std::size_t D = 4;
    const Eigen::MatrixXd X = testing::random_unit_matrix(25, D, gen);
    std::vector<double> y(25);
    for (int i = 0; i < 25; ++i) y[i] = std::pow(X(i, 0) - 0.3, 2) + 0.5 * std::sin(5 * X(i, 2));
    KernelParams p = testing::random_params(kind, D, gen, 0.5, 2.0);
    p.theta_f = 1.0;
    p.theta_c = 0.1;
    for (auto& t : p.theta) t = std::max(t, 0.2);
    for (auto& t : p.gamma) t = std::max(t, 0.2);
    std::optional<AnchorPoint> anchor;
    if (kind != KernelKind::ard_se) anchor = AnchorPoint{{0.3, 0.5, 0.2, 0.9}};
    const GPModel m = GPModel::build(X, y, p, anchor);
    const FanovaOptions opts{10, 128, 3};
    const auto fast = importance(m, opts);
    const auto slow = importance([&](std::span<const double> x) { return m.predict_mean(x); }, D, opts);
    for (std::size_t d = 0; d < D; ++d) {
      CHECK(std::abs(fast.variances[d] - slow.variances[d]) <= 1e-9);
      for (std::size_t g = 0; g < opts.grid_size; ++g) {
        CHECK(std::abs(fast.curves[d].values[g] - slow.curves[d].values[g]) <= 1e-9);
      }
    }
  }
}
