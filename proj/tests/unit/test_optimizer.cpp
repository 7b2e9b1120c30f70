#include "houses/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "houses/benchmarks.hpp"
#include "houses/errors.hpp"

using namespace houses;

namespace {

FunctionObjective counting(std::size_t& calls, double (*f)(std::span<const double>)) {
  return FunctionObjective([&calls, f](const Configuration& c) {
    ++calls;
    return EvalOutcome::success(f(c.unit));
  });
}

RunConfig small_config(Strategy s, std::size_t budget, std::uint64_t seed) {
  RunConfig c;
  c.strategy = s;
  c.budget = budget;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("budget equal to n0 is a pure LHS run") {
  const SearchSpace space = SearchSpace::unit_cube(3);
  std::size_t calls = 0;
  auto obj = counting(calls, bench::sphere);
  RunConfig cfg = small_config(Strategy::houses, 10, 4);
  cfg.n0 = 10;
  const RunState st = run(space, obj, cfg);
  CHECK(calls == 10);
  const auto lhs = lhs_sample(space, 10, 4);
  double best = INFINITY;
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(st.history[i].unit == lhs[i].unit);
    CHECK(st.history[i].generation == 0);
    best = std::min(best, bench::sphere(lhs[i].unit));
  }
  CHECK(*st.best_value() == best);
}

TEST_CASE("sphere in three dimensions converges") {
  const SearchSpace space = SearchSpace::unit_cube(3);
  std::size_t calls = 0;
  auto obj = counting(calls, bench::sphere);
  RunConfig cfg = small_config(Strategy::houses, 60, 1);
  cfg.n0 = 10;
  const RunState st = run(space, obj, cfg);
  CHECK(st.history.size() == 60);
  CHECK(calls == 60);
  CHECK(*st.best_value() <= 0.01);
}

TEST_CASE("incumbent, anchor and generations are coherent") {
  const SearchSpace space = SearchSpace::unit_cube(2);
  for (Strategy s : {Strategy::houses, Strategy::gp_stationary, Strategy::random}) {
    CAPTURE(to_string(s));
    std::size_t calls = 0;
    auto obj = counting(calls, bench::branin);
    std::vector<double> seen;
    const RunState st = run(space, obj, small_config(s, 30, 2), [&](const EvaluationRecord& r) {
      seen.push_back(r.value);
      CHECK(r.index + 1 == seen.size());
    });
    REQUIRE(st.history.size() == 30);
    CHECK(seen.size() == 30);
    const auto trace = best_so_far(st.history);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1]);
    CHECK(trace.back() == *st.best_value());
    CHECK(st.anchor.s == st.best()->unit);
    CHECK(update_anchor(st).s == st.best()->unit);
    for (const auto& r : st.history) {
      CHECK_FALSE(r.rng.empty());
      for (double u : r.unit) {
        CHECK(u >= 0.0);
        CHECK(u <= 1.0);
      }
    }
    if (s != Strategy::random) {
      for (std::size_t i = 10; i < 30; ++i) CHECK(st.history[i].generation == i - 9);
    }
  }
}

TEST_CASE("stationary baseline never touches the non-stationary kernels") {
  const SearchSpace space = SearchSpace::unit_cube(2);
  std::size_t calls = 0;
  auto obj = counting(calls, bench::branin);
  const auto before = nonstationary_kernel_evaluations();
  RunConfig cfg = small_config(Strategy::gp_stationary, 25, 3);
  cfg.kernel = KernelKind::houses;  // ignored by the baseline
  run(space, obj, cfg);
  CHECK(nonstationary_kernel_evaluations() == before);
  run(space, obj, small_config(Strategy::houses, 12, 3));
  CHECK(nonstationary_kernel_evaluations() > before);
}

TEST_CASE("failed evaluations consume budget and are skipped") {
  const SearchSpace space = SearchSpace::unit_cube(2);
  std::size_t calls = 0;
  FunctionObjective obj([&](const Configuration& c) {
    ++calls;
    if (calls % 3 == 0) return EvalOutcome::failure("crash");
    if (calls % 7 == 0) throw std::runtime_error("boom");
    if (calls % 11 == 0) return EvalOutcome::success(NAN);
    return EvalOutcome::success(bench::sphere(c.unit));
  });
  const RunState st = run(space, obj, small_config(Strategy::houses, 40, 5));
  CHECK(calls == 40);
  CHECK(st.history.size() == 40);
  std::size_t failed = 0;
  for (const auto& r : st.history) {
    if (!r.ok()) {
      ++failed;
      CHECK(std::isnan(r.value));
      CHECK_FALSE(r.message.empty());
    }
  }
  CHECK(failed >= 13);
  CHECK(st.best()->ok());
}

TEST_CASE("all-failing objective still runs to budget") {
  const SearchSpace space = SearchSpace::unit_cube(2);
  std::size_t calls = 0;
  FunctionObjective obj([&](const Configuration&) {
    ++calls;
    return EvalOutcome::failure("always");
  });
  const RunState st = run(space, obj, small_config(Strategy::houses, 15, 1));
  CHECK(calls == 15);
  CHECK_FALSE(st.best_value().has_value());
  CHECK(std::isinf(best_so_far(st.history).back()));
}

TEST_CASE("runs are deterministic") {
  const SearchSpace space = SearchSpace::unit_cube(2);
  for (Strategy s : {Strategy::houses, Strategy::random}) {
    std::size_t calls = 0;
    auto obj = counting(calls, bench::branin);
    const RunState a = run(space, obj, small_config(s, 20, 8));
    const RunState b = run(space, obj, small_config(s, 20, 8));
    const RunState c = run(space, obj, small_config(s, 20, 9));
    for (std::size_t i = 0; i < 20; ++i) {
      CHECK(a.history[i].unit == b.history[i].unit);
      CHECK(a.history[i].rng == b.history[i].rng);
    }
    CHECK(a.history.back().unit != c.history.back().unit);
  }
}

TEST_CASE("random search") {
  const SearchSpace space = SearchSpace::unit_cube(1);
  std::size_t calls = 0;
  auto obj = counting(calls, bench::sphere);
  const RunState one = run_random(space, obj, 1, 0);
  CHECK(one.history.size() == 1);

  const RunState st = run_random(space, obj, 1000, 11);
  std::vector<int> deciles(10, 0);
  for (const auto& r : st.history) ++deciles[std::min(9, static_cast<int>(r.unit[0] * 10))];
  for (int c : deciles) {
    CHECK(c >= 60);
    CHECK(c <= 140);
  }
  const RunState again = run_random(space, obj, 1000, 11);
  CHECK(again.history[999].unit == st.history[999].unit);
}

TEST_CASE("update_anchor") {
  RunState st;
  EvaluationRecord a;
  a.unit = {0.1, 0.2};
  a.value = 2.0;
  st.history.push_back(a);
  CHECK(update_anchor(st).s == a.unit);
  EvaluationRecord b = a;
  b.index = 1;
  b.unit = {0.5, 0.5};
  b.value = 1.0;
  st.history.push_back(b);
  CHECK(update_anchor(st).s == b.unit);
  EvaluationRecord c = a;
  c.index = 2;
  c.unit = {0.9, 0.9};
  c.value = 3.0;
  st.history.push_back(c);
  CHECK(update_anchor(st).s == b.unit);
  EvaluationRecord d = b;
  d.index = 3;
  d.unit = {0.7, 0.7};
  st.history.push_back(d);  // tie: earliest wins
  CHECK(update_anchor(st).s == b.unit);
}

TEST_CASE("run config validation and serialization") {
  RunConfig c;
  c.budget = 5;
  CHECK_THROWS_AS(c.validate(2), ArgumentError);
  c.n0 = 1;
  CHECK_THROWS_AS(c.validate(2), ArgumentError);
  c = {};
  CHECK(c.initial_size(3) == 10);
  CHECK(c.initial_size(8) == 16);
  c.strategy = Strategy::gp_stationary;
  CHECK(c.surrogate_kernel() == KernelKind::ard_se);
  c.seed = 42;
  c.es.eta = 15;
  const RunConfig back = RunConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(parse_strategy("gp") == Strategy::gp_stationary);
  CHECK_THROWS_AS(parse_strategy("tpe"), ArgumentError);
}

TEST_CASE("resume continues an interrupted run exactly") {
  const SearchSpace space = SearchSpace::unit_cube(3);
  std::size_t calls = 0;
  auto obj = counting(calls, bench::sphere);
  RunConfig full = small_config(Strategy::houses, 40, 12);
  const RunState whole = run(space, obj, full);
  RunConfig part = full;
  part.budget = 23;
  const RunState head = run(space, obj, part);
  const RunState tail = resume(space, obj, full, head.history);
  REQUIRE(tail.history.size() == 40);
  for (std::size_t i = 0; i < 40; ++i) CHECK(tail.history[i].unit == whole.history[i].unit);
  CHECK(best_so_far(tail.history) == best_so_far(whole.history));

  auto broken = head.history;
  broken[3].index = 7;
  CHECK_THROWS_AS(resume(space, obj, full, broken), DataError);
}
