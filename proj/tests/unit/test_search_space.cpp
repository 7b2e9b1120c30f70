#include "houses/search_space.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "doctest.h"
#include "houses/errors.hpp"
#include "temp_dir.hpp"

using namespace houses;

namespace {

SearchSpace one(ParamSpec p) { return SearchSpace({std::move(p)}); }

SearchSpace mixed() {
  return SearchSpace({{"lr", ParamKind::continuous, 1e-4, 1e-1, Scale::logarithmic},
                      {"units", ParamKind::integer, 1, 5, Scale::linear},
                      {"drop", ParamKind::continuous, 0.0, 10.0, Scale::linear}});
}

}  // namespace

TEST_CASE("normalize maps raw values onto the unit interval") {
  const double lin[] = {5.0};
  CHECK(normalize(one({"a", ParamKind::continuous, 0, 10, Scale::linear}), lin)[0] == doctest::Approx(0.5).epsilon(1e-15));
  const double lg[] = {1e-2};
  CHECK(normalize(one({"a", ParamKind::continuous, 1e-4, 1e-1, Scale::logarithmic}), lg)[0] ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  const double top[] = {5.0};
  CHECK(normalize(one({"a", ParamKind::integer, 1, 5, Scale::linear}), top)[0] == 1.0);
}

TEST_CASE("normalize rejects out-of-bounds values and names the parameter") {
  const double raw[] = {1e-2, 6.0, 3.0};
  try {
    normalize(mixed(), raw);
    FAIL("expected BoundsError");
  } catch (const BoundsError& e) {
    CHECK(std::string(e.what()).find("units") != std::string::npos);
  }
  const double short_raw[] = {1e-2};
  CHECK_THROWS_AS(normalize(mixed(), short_raw), ArgumentError);
}

TEST_CASE("denormalize inverts normalize") {
  const double mid[] = {0.5};
  CHECK(denormalize(one({"a", ParamKind::continuous, 0, 10, Scale::linear}), mid)[0] == 5.0);
  const double u[] = {0.49};
  CHECK(denormalize(one({"a", ParamKind::integer, 1, 5, Scale::linear}), u)[0] == 3.0);
  const double end[] = {1.0};
  CHECK(denormalize(one({"a", ParamKind::continuous, 1e-4, 1e-1, Scale::logarithmic}), end)[0] ==
        doctest::Approx(1e-1).epsilon(1e-15));

  const double bad[] = {1.5};
  CHECK_THROWS_AS(denormalize(one({"a", ParamKind::continuous, 0, 1, Scale::linear}), bad), DomainError);
  const double neg[] = {-0.1};
  CHECK_THROWS_AS(denormalize(one({"a", ParamKind::continuous, 0, 1, Scale::linear}), neg), DomainError);
}

TEST_CASE("continuous round trip stays within 1e-12") {
  const SearchSpace space = mixed();
  for (int i = 0; i <= 1000; ++i) {
    const double t = i / 1000.0;
    const std::vector<double> u{t, 0.5, t};
    const auto raw = denormalize(space, u);
    const auto back = normalize(space, raw);
    CHECK(std::abs(back[0] - u[0]) <= 1e-12);
    CHECK(std::abs(back[2] - u[2]) <= 1e-12);
  }
}

TEST_CASE("integer parameters round then clamp") {
  const SearchSpace space = one({"k", ParamKind::integer, 2, 64, Scale::linear});
  for (int v = 2; v <= 64; ++v) {
    const double raw[] = {static_cast<double>(v)};
    CHECK(denormalize(space, normalize(space, raw))[0] == v);
  }
  const double u0[] = {0.0}, u1[] = {1.0};
  CHECK(denormalize(space, u0)[0] == 2.0);
  CHECK(denormalize(space, u1)[0] == 64.0);
}

TEST_CASE("invalid parameter specs are rejected") {
  CHECK_THROWS_AS(one({"a", ParamKind::continuous, 1, 1, Scale::linear}), ArgumentError);
  CHECK_THROWS_AS(one({"a", ParamKind::continuous, 0, 1, Scale::logarithmic}), ArgumentError);
  CHECK_THROWS_AS(one({"a", ParamKind::integer, 0.5, 3, Scale::linear}), ArgumentError);
  CHECK_THROWS_AS(one({"a", ParamKind::integer, 1, 1.5, Scale::linear}), ArgumentError);
  CHECK_THROWS_AS(SearchSpace({{"a", ParamKind::continuous, 0, 1, Scale::linear},
                               {"a", ParamKind::continuous, 0, 1, Scale::linear}}),
                  ArgumentError);
  CHECK_THROWS_AS(SearchSpace(std::vector<ParamSpec>{}), ArgumentError);
}

TEST_CASE("lhs: one point per bin in every dimension") {
  const SearchSpace space = SearchSpace::unit_cube(2);
  const auto pts = lhs_sample(space, 4, 11);
  REQUIRE(pts.size() == 4);
  for (std::size_t d = 0; d < 2; ++d) {
    std::vector<int> bins;
    for (const auto& p : pts) bins.push_back(static_cast<int>(std::floor(4 * p.unit[d])));
    std::sort(bins.begin(), bins.end());
    CHECK(bins == std::vector<int>{0, 1, 2, 3});
  }

  const auto single = lhs_sample(mixed(), 1, 3);
  REQUIRE(single.size() == 1);
  for (double u : single[0].unit) {
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK_THROWS_AS(lhs_sample(space, 0, 1), ArgumentError);
}

TEST_CASE("lhs stratification holds for larger designs") {
  const SearchSpace space = SearchSpace::unit_cube(5);
  for (std::size_t n : {2u, 7u, 50u, 333u}) {
    const auto pts = lhs_sample(space, n, n * 13);
    for (std::size_t d = 0; d < 5; ++d) {
      std::vector<std::size_t> bins;
      for (const auto& p : pts) bins.push_back(std::min<std::size_t>(n - 1, static_cast<std::size_t>(std::floor(n * p.unit[d]))));
      std::sort(bins.begin(), bins.end());
      for (std::size_t i = 0; i < n; ++i) CHECK(bins[i] == i);
    }
  }
}

TEST_CASE("lhs is deterministic in the seed") {
  const auto a = lhs_sample(mixed(), 20, 5);
  const auto b = lhs_sample(mixed(), 20, 5);
  const auto c = lhs_sample(mixed(), 20, 6);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].unit == b[i].unit);
    CHECK(a[i].raw == b[i].raw);
    differs = differs || a[i].unit != c[i].unit;
  }
  CHECK(differs);
}

TEST_CASE("space files round trip through JSON") {
  testing::TempDir dir;
  const SearchSpace space = mixed();
  {
    std::ofstream out(dir / "space.json");
    out << space.to_json().dump(2);
  }
  CHECK(SearchSpace::load(dir / "space.json") == space);

  const auto doc = nlohmann::json::parse(R"({"params": [
    {"name": "lr", "kind": "continuous", "lower": 0.001, "upper": 1, "scale": "logarithmic"},
    {"name": "n", "kind": "integer", "lower": 2, "upper": 8}]})");
  const SearchSpace parsed = SearchSpace::from_json(doc);
  CHECK(parsed.dim() == 2);
  CHECK(parsed.param(1).scale == Scale::linear);
  CHECK(parsed.names() == std::vector<std::string>{"lr", "n"});

  CHECK_THROWS(SearchSpace::from_json(nlohmann::json::parse(R"({"params": [{"name": "x", "kind": "cat", "lower": 0, "upper": 1}]})")));
  CHECK_THROWS(SearchSpace::load(dir / "missing.json"));
}

TEST_CASE("shipped config files load") {
  for (const char* name : {"branin.json", "hartmann6.json", "sphere3.json", "rastrigin4.json", "mlp_synth.json"}) {
    CAPTURE(name);
    CHECK_NOTHROW(SearchSpace::load(std::filesystem::path(HOUSES_CONFIG_DIR) / name));
  }
}
