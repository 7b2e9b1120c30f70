#include "houses/run_log.hpp"

#include <cmath>
#include <fstream>

#include "doctest.h"
#include "houses/benchmarks.hpp"
#include "houses/errors.hpp"
#include "houses/optimizer.hpp"
#include "temp_dir.hpp"

using namespace houses;

namespace {

EvaluationRecord make_record(std::size_t i, bool ok = true) {
  EvaluationRecord r;
  r.index = i;
  r.unit = {0.1 * static_cast<double>(i % 10), 1.0 / 3.0};
  r.raw = {static_cast<double>(i), 2.5e-7};
  r.value = ok ? std::sqrt(2.0) * static_cast<double>(i) : NAN;
  r.status = ok ? EvalStatus::ok : EvalStatus::failed;
  r.wall_ms = 1.25;
  r.generation = i / 2;
  r.rng = "7/80/" + std::to_string(i);
  if (!ok) r.message = "worker exited with code 1";
  return r;
}

void append_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::app);
  out << text;
}

struct Interrupted {};

}  // namespace

TEST_CASE("records round trip through JSON") {
  for (bool ok : {true, false}) {
    const EvaluationRecord r = make_record(3, ok);
    const auto doc = record_to_json(r);
    const EvaluationRecord back = record_from_json(nlohmann::json::parse(doc.dump()));
    CHECK(back.index == r.index);
    CHECK(back.unit == r.unit);
    CHECK(back.raw == r.raw);
    CHECK(back.status == r.status);
    CHECK(back.generation == r.generation);
    CHECK(back.rng == r.rng);
    CHECK(back.message == r.message);
    if (ok) {
      CHECK(back.value == r.value);
    } else {
      CHECK(doc["value"].is_null());
      CHECK(std::isnan(back.value));
    }
  }
  CHECK_THROWS_AS(record_from_json(nlohmann::json::parse(R"({"index": 0})")), FormatError);
  CHECK_THROWS_AS(record_from_json(nlohmann::json::parse(
                      R"({"index": 0, "unit": [0.5], "raw": [0.5], "value": null, "status": "ok"})")),
                  FormatError);
}

TEST_CASE("replay") {
  testing::TempDir dir;
  const auto path = dir / "run.jsonl";
  const nlohmann::json header{{"seed", 7}};

  SUBCASE("k records") {
    {
      RunLogWriter w(path, header, {make_record(0), make_record(1)});
      for (std::size_t i = 2; i < 9; ++i) w.append(make_record(i, i % 4 != 0));
    }
    const ReplayResult r = replay_run_log(path);
    REQUIRE(r.header.has_value());
    CHECK((*r.header)["seed"] == 7);
    CHECK(r.records.size() == 9);
    CHECK(r.warnings.empty());
    CHECK_FALSE(r.records[4].ok());
  }

  SUBCASE("corrupt trailing line is dropped with a warning") {
    { RunLogWriter w(path, header, {make_record(0), make_record(1)}); }
    append_text(path, R"({"index": 2, "unit": [0.1)");
    const ReplayResult r = replay_run_log(path);
    CHECK(r.records.size() == 2);
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].find("trailing") != std::string::npos);
  }

  SUBCASE("corrupt interior line is an error") {
    { RunLogWriter w(path, header, {make_record(0)}); }
    append_text(path, "garbage\n");
    append_text(path, record_to_json(make_record(1)).dump() + "\n");
    CHECK_THROWS_AS(replay_run_log(path), FormatError);
  }

  SUBCASE("out-of-sequence index is an error") {
    { RunLogWriter w(path, header, {make_record(0), make_record(2), make_record(3)}); }
    CHECK_THROWS_AS(replay_run_log(path), FormatError);
  }

  SUBCASE("empty file is a fresh state") {
    { std::ofstream out(path); }
    const ReplayResult r = replay_run_log(path);
    CHECK_FALSE(r.header.has_value());
    CHECK(r.records.empty());
  }

  SUBCASE("missing file") { CHECK_THROWS_AS(replay_run_log(dir / "nope.jsonl"), ArgumentError); }
}

TEST_CASE("interrupted run resumed from its log equals an uninterrupted run") {
  testing::TempDir dir;
  const SearchSpace space = SearchSpace::unit_cube(3);
  BuiltinObjective obj("sphere", space);
  RunConfig cfg;
  cfg.budget = 100;
  cfg.seed = 21;

  const RunState whole = run(space, obj, cfg);

  const auto path = dir / "run.jsonl";
  {
    RunLogWriter writer(path, cfg.to_json());
    try {
      run(space, obj, cfg, [&](const EvaluationRecord& r) {
        writer.append(r);
        if (r.index == 49) throw Interrupted{};
      });
    } catch (const Interrupted&) {
    }
  }
  const ReplayResult replay = replay_run_log(path);
  REQUIRE(replay.records.size() == 50);
  const RunConfig back = RunConfig::from_json(*replay.header);
  const RunState resumed = resume(space, obj, back, replay.records);
  REQUIRE(resumed.history.size() == 100);
  CHECK(best_so_far(resumed.history) == best_so_far(whole.history));
  for (std::size_t i = 0; i < 100; ++i) {
    CHECK(resumed.history[i].unit == whole.history[i].unit);
    CHECK(resumed.history[i].rng == whole.history[i].rng);
  }
}
