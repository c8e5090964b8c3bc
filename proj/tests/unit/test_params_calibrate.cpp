#include "doctest.h"
#include "json.hpp"
#include "padbench/calibrate.hpp"
#include "padbench/params.hpp"
#include "test_support.hpp"

using namespace padbench;

TEST_CASE("shipped default parameter file equals the built-in defaults") {
  const auto file = parse_params(testsupport::read_file(testsupport::data_dir() / "calibration/default_params.json"));
  const auto built = default_params();
  CHECK(file.motor == built.motor);
  CHECK(file.decision == built.decision);
  CHECK(format_params(built) == testsupport::read_file(testsupport::data_dir() / "calibration/default_params.json"));
}

TEST_CASE("params format round-trips") {
  SimParams p = default_params();
  p.decision.react_ms = 123.456789012345;
  const auto back = parse_params(format_params(p));
  CHECK(back.motor == p.motor);
  CHECK(back.decision == p.decision);
}

TEST_CASE("params file validation") {
  auto doc = nlohmann::json::parse(format_params(default_params()));
  const auto rejects = [](const nlohmann::json& j) {
    try {
      parse_params(j.dump());
    } catch (const ParamsError&) {
      return true;
    }
    return false;
  };
  CHECK_FALSE(rejects(doc));
  auto bad = doc;
  bad["version"] = 2;
  CHECK(rejects(bad));
  bad = doc;
  bad["motor"].erase("fitts_b");
  CHECK(rejects(bad));
  bad = doc;
  bad["motor"]["fitts_c"] = 1.0;
  CHECK(rejects(bad));
  bad = doc;
  bad["decision"]["overshoot_prob"] = 1.5;
  CHECK(rejects(bad));
  bad = doc;
  bad["motor"]["fitts_a"] = "fast";
  CHECK(rejects(bad));
  CHECK_THROWS_AS(parse_params("{"), ParamsError);
}

TEST_CASE("dotted parameter access") {
  SimParams p = default_params();
  CHECK(param_names().size() == 14);
  for (const auto& n : param_names()) {
    set_param(p, n, 0.25);
    CHECK(get_param(p, n) == 0.25);
  }
  CHECK_THROWS_AS(get_param(p, "motor.nope"), ParamsError);
  CHECK_THROWS_AS(set_param(p, "nope", 1.0), ParamsError);
}

TEST_CASE("condition names") {
  CHECK(condition_from_name("trackpad", 4).device == Device::Trackpad);
  CHECK(condition_from_name("pad-ideal", 4).profile->name() == "ideal");
  CHECK(condition_from_name("pad-uniform3", 4, 120).release_window_ms == 120);
  CHECK_THROWS_AS(condition_from_name("pad-psychic", 4), std::invalid_argument);
}

TEST_CASE("targets and search-space parsing") {
  const auto t = parse_targets(testsupport::read_file(testsupport::data_dir() / "calibration/reported_targets.json"));
  CHECK(t.conditions.size() == 3);
  CHECK(t.gaps.size() == 1);
  const auto s = parse_search_space(testsupport::read_file(testsupport::data_dir() / "calibration/search_space.json"),
                                    default_params());
  CHECK(s.mode == SearchMode::Random);
  CHECK_FALSE(s.free.empty());

  CHECK_THROWS_AS(parse_targets(R"({"version":1,"conditions":[]})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_targets(R"({"conditions":[]})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_search_space(R"({"version":1,"free":[{"name":"motor.fitts_b","lo":5,"hi":1}]})",
                                     default_params()),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_search_space(R"({"version":1,"free":[{"name":"motor.x","lo":0,"hi":1}]})",
                                     default_params()),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_search_space(R"({"version":1,"mode":"annealing"})", default_params()),
                  std::invalid_argument);
}

TEST_CASE("calibration recovers known parameters on a grid") {
  // Targets generated from known parameters; the grid contains them exactly.
  SimParams truth = default_params();
  truth.motor.fitts_b = 220.0;
  truth.decision.overshoot_prob = 0.4;
  SearchSpace space;
  space.base = default_params();
  space.mode = SearchMode::Grid;
  space.eval_trials = 1500;
  space.free = {{"motor.fitts_b", 180.0, 260.0, 5}, {"decision.overshoot_prob", 0.2, 0.6, 5}};

  const std::vector<std::string> names = {"trackpad", "pad-uniform3"};
  const auto stats = evaluate_conditions(truth, names, space);
  CalibrationTargets targets;
  for (const auto& n : names) {
    targets.conditions.push_back({n, stats.at(n).mean_tp, stats.at(n).mean_strokes, stats.at(n).error_rate, 0});
  }
  const auto res = calibrate(targets, space, 1);
  CHECK(res.params.motor.fitts_b == doctest::Approx(220.0));
  CHECK(res.params.decision.overshoot_prob == doctest::Approx(0.4));
  CHECK(res.objective == doctest::Approx(0.0));
  CHECK(res.evaluations == 1 + 25);
}

TEST_CASE("pinned search space reproduces its parameters") {
  const auto base = default_params();
  SearchSpace space;
  space.base = base;
  space.eval_trials = 300;
  space.samples = 5;
  space.refine_rounds = 2;
  space.free = {{"motor.fitts_a", base.motor.fitts_a, base.motor.fitts_a, 2}};
  const auto targets = parse_targets(testsupport::read_file(testsupport::data_dir() / "calibration/reported_targets.json"));
  const auto a = calibrate(targets, space, 3);
  const auto b = calibrate(targets, space, 3);
  CHECK(a.params.motor == base.motor);
  CHECK(a.params.decision == base.decision);
  CHECK(b.objective == a.objective);
}

TEST_CASE("empty search range is an error") {
  SearchSpace space;
  space.base = default_params();
  space.free = {{"motor.fitts_a", 10, 5, 2}};
  CalibrationTargets t;
  t.conditions.push_back({"trackpad", 4.2, 1.67, 0.091, 310});
  CHECK_THROWS_AS(calibrate(t, space, 1), std::invalid_argument);
}

TEST_CASE("gap penalty only bites above the limit") {
  CalibrationTargets t;
  t.conditions.push_back({"trackpad", 4.0, 1.0, 0.0, 0});
  std::map<std::string, ConditionStats> stats;
  stats["trackpad"] = {100, 4.0, 1.0, 0.0};
  stats["pad-ideal"] = {100, 4.4, 1.0, 0.0};
  CHECK(calibration_objective(t, stats) == 0.0);
  t.gaps.push_back({"pad-ideal", "trackpad", 0.45});
  CHECK(calibration_objective(t, stats) == 0.0);
  stats["pad-ideal"].mean_tp = 4.6;
  CHECK(calibration_objective(t, stats) > 0.0);
}
