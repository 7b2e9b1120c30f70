#include "houses/es_search.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "houses/errors.hpp"
#include "houses/gp.hpp"
#include "oracles.hpp"

using namespace houses;

namespace {

std::vector<Individual> random_history(std::size_t n, std::size_t D, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Individual> h(n);
  for (std::size_t i = 0; i < n; ++i) {
    h[i].unit.resize(D);
    for (auto& x : h[i].unit) x = u(gen);
    h[i].value = u(gen);
    h[i].index = i;
  }
  return h;
}

GPModel toy_model(std::size_t D, std::mt19937_64& gen) {
  const Eigen::MatrixXd X = testing::random_unit_matrix(12, D, gen);
  std::vector<double> y(12);
  for (int i = 0; i < 12; ++i) y[i] = (X.row(i).array() - 0.4).square().sum();
  return GPModel::build(X, y, KernelParams::defaults(KernelKind::ard_se, D), std::nullopt);
}

}  // namespace

TEST_CASE("grid_select examples") {
  std::vector<Individual> one{{{0.3, 0.7}, 1.0, 0}};
  const auto p1 = grid_select(one, 4);
  REQUIRE(p1.size() == 1);
  CHECK(p1[0].index == 0);

  std::vector<Individual> h{{{0.1}, 3.0, 0}, {{0.2}, 1.0, 1}, {{0.9}, 2.0, 2}};
  const auto p2 = grid_select(h, 2);
  REQUIRE(p2.size() == 2);
  CHECK(p2[0].unit[0] == 0.2);
  CHECK(p2[1].unit[0] == 0.9);

  std::vector<Individual> edge{{{1.0}, 0.0, 0}};
  CHECK(grid_select(edge, 3).size() == 1);
  CHECK_THROWS_AS(grid_select(std::vector<Individual>{}, 3), ArgumentError);
}

TEST_CASE("grid_select matches a brute-force scan") {
  std::mt19937_64 gen(1);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t D = 1 + rep % 4, M = 1 + rep % 5;
    const auto h = random_history(30, D, gen);
    std::set<std::size_t> want;
    for (std::size_t d = 0; d < D; ++d) {
      for (std::size_t b = 0; b < M; ++b) {
        std::ptrdiff_t best = -1;
        for (std::size_t i = 0; i < h.size(); ++i) {
          const double lo = static_cast<double>(b) / M, hi = static_cast<double>(b + 1) / M;
          const double u = h[i].unit[d];
          const bool in = (u >= lo && u < hi) || (b == M - 1 && u == 1.0);
          if (in && (best < 0 || h[i].value < h[best].value)) best = static_cast<std::ptrdiff_t>(i);
        }
        if (best >= 0) want.insert(static_cast<std::size_t>(best));
      }
    }
    const auto got = grid_select(h, M);
    std::set<std::size_t> got_idx;
    for (const auto& p : got) got_idx.insert(p.index);
    CHECK(got_idx == want);
    CHECK(got.size() == got_idx.size());
    CHECK(got.size() <= D * M);
  }
}

TEST_CASE("mutation probabilities") {
  ESConfig cfg;
  cfg.pm = 0.3;
  const std::vector<double> uniform(4, 0.25);
  for (double p : mutation_probabilities(uniform, cfg)) CHECK(p == doctest::Approx(0.3).epsilon(1e-14));

  const std::vector<double> skew{1.0, 0.0};
  const auto p = mutation_probabilities(skew, cfg);
  CHECK(p[0] == doctest::Approx(0.6 * 1.01 / 1.02).epsilon(1e-14));
  CHECK(std::abs(p[0] - 0.594) <= 1e-3);
  CHECK(p[1] == 0.05);

  // Unclamped probabilities average to the base rate.
  ESConfig wide;
  wide.pm = 0.2;
  wide.p_min = 1e-9;
  wide.p_max = 1.0;
  const std::vector<double> imp{0.5, 0.3, 0.15, 0.05};
  const auto q = mutation_probabilities(imp, wide);
  CHECK((q[0] + q[1] + q[2] + q[3]) / 4 == doctest::Approx(0.2).epsilon(1e-14));
  for (std::size_t d = 1; d < 4; ++d) CHECK(q[d - 1] > q[d]);

  ESConfig def;
  std::mt19937_64 gen(3);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> I(1 + rep % 8);
    double total = 0.0;
    for (auto& v : I) total += v = std::uniform_real_distribution<double>(0, 1)(gen);
    for (auto& v : I) v /= total;
    const auto r = mutation_probabilities(I, def);
    for (std::size_t d = 0; d < I.size(); ++d) {
      CHECK(r[d] >= def.p_min);
      CHECK(r[d] <= def.p_max);
      for (std::size_t e = 0; e < I.size(); ++e) {
        if (I[d] > I[e]) CHECK(r[d] >= r[e]);
      }
    }
  }
  CHECK(def.base_rate(4) == 0.25);
}

TEST_CASE("es config validation") {
  ESConfig c;
  CHECK_NOTHROW(c.validate());
  c.grids = 0;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
  c = {};
  c.p_min = 0.5;
  c.p_max = 0.4;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
  c = {};
  c.eta = 0;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
  c = {};
  c.pm = 1.5;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
}

TEST_CASE("polynomial mutation") {
  Rng rng(4);
  const std::vector<double> parent{0.0, 0.3, 1.0};
  const std::vector<double> none(3, 0.0);
  CHECK(polynomial_mutation(parent, none, 20, rng) == parent);

  const std::vector<double> all(3, 1.0);
  for (double eta : {0.5, 2.0, 20.0, 100.0}) {
    for (int i = 0; i < 10000; ++i) {
      const auto c = polynomial_mutation(parent, all, eta, rng);
      for (double x : c) {
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
      }
    }
  }

  double sum = 0.0;
  const std::vector<double> mid{0.5}, one_prob{1.0};
  for (int i = 0; i < 100000; ++i) sum += polynomial_mutation(mid, one_prob, 20, rng)[0];
  CHECK(std::abs(sum / 100000 - 0.5) <= 0.01);

  // A gene moves a fraction delta of the way to the bound it heads for.
  Rng a(9), b(9);
  const std::vector<double> x{0.8};
  const double child = polynomial_mutation(x, one_prob, 20, a)[0];
  b.uniform();
  const double r = b.uniform();
  const double want = r < 0.5 ? 0.8 + (std::pow(2 * r, 1.0 / 21) - 1) * 0.8
                              : 0.8 + (1 - std::pow(2 * (1 - r), 1.0 / 21)) * 0.2;
  CHECK(child == doctest::Approx(want).epsilon(1e-15));
  CHECK_THROWS_AS(polynomial_mutation(x, all, 20, a), ArgumentError);
}

TEST_CASE("propose") {
  std::mt19937_64 gen(6);
  const std::size_t D = 3;
  const GPModel model = toy_model(D, gen);
  const AcquisitionSpec spec{AcquisitionKind::ucb, 2.0, 0.1};
  const std::vector<double> imp(D, 1.0 / D);

  SUBCASE("degenerate ES proposes the parent") {
    ESConfig cfg;
    cfg.offspring = 1;
    cfg.p_min = cfg.p_max = 1e-300;
    const std::vector<Individual> parents{{{0.2, 0.4, 0.6}, 1.0, 0}};
    Rng rng(1);
    CHECK(propose(model, spec, parents, imp, cfg, rng).unit == parents[0].unit);
  }

  SUBCASE("winner beats every candidate and matches re-scoring") {
    const auto history = random_history(40, D, gen);
    const auto parents = grid_select(history, 5);
    ESConfig cfg;
    Rng rng(77);
    const Proposal p = propose(model, spec, parents, imp, cfg, rng, {}, true);
    REQUIRE(p.scored.size() == parents.size() * cfg.offspring);
    CHECK(p.candidates == p.scored.size());
    std::vector<Candidate> rescored;
    for (const auto& c : p.scored) {
      const Prediction pr = model.predict(c.point);
      rescored.push_back({c.point, pr.mean, std::sqrt(pr.variance)});
      CHECK(p.score >= score(spec, pr.mean, std::sqrt(pr.variance)));
      for (double u : c.point) {
        CHECK(u >= 0.0);
        CHECK(u <= 1.0);
      }
    }
    CHECK(rescored[argbest(spec, rescored)].point == p.unit);

    Rng again(77);
    CHECK(propose(model, spec, parents, imp, cfg, again).unit == p.unit);
    CHECK(rng.next_u64() == again.next_u64());
  }

  SUBCASE("duplicates of evaluated points are replaced") {
    ESConfig cfg;
    cfg.offspring = 1;
    cfg.p_min = cfg.p_max = 1e-300;
    const std::vector<Individual> parents{{{0.2, 0.4, 0.6}, 1.0, 0}};
    const std::vector<std::vector<double>> seen{parents[0].unit};
    Rng rng(2);
    const Proposal p = propose(model, spec, parents, imp, cfg, rng, seen);
    CHECK(p.replaced_duplicate);
    CHECK(p.unit != parents[0].unit);
    CHECK(p.score == score(spec, model.predict(p.unit).mean, std::sqrt(model.predict(p.unit).variance)));
  }

  SUBCASE("errors") {
    Rng rng(3);
    CHECK_THROWS_AS(propose(model, spec, std::vector<Individual>{}, imp, ESConfig{}, rng), ArgumentError);
  }
}
