#include "padbench/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "json.hpp"
#include "padbench/params.hpp"

namespace padbench {

using nlohmann::json;

namespace {

constexpr double kGapPenaltyWeight = 25.0;

std::vector<std::string> condition_names(const CalibrationTargets& targets) {
  std::vector<std::string> out;
  for (const auto& c : targets.conditions) out.push_back(c.condition);
  for (const auto& g : targets.gaps) {
    for (const auto& n : {g.high, g.low}) {
      if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
    }
  }
  return out;
}

struct Scored {
  SimParams params;
  double objective = std::numeric_limits<double>::infinity();
};

class Evaluator {
 public:
  Evaluator(const CalibrationTargets& targets, const SearchSpace& space)
      : targets_(targets), space_(space), names_(condition_names(targets)) {}

  double operator()(const SimParams& p) {
    ++count_;
    try {
      p.motor.validate();
      p.decision.validate();
    } catch (const std::invalid_argument&) {
      return std::numeric_limits<double>::infinity();
    }
    return calibration_objective(targets_, evaluate_conditions(p, names_, space_));
  }

  std::size_t count() const { return count_; }
  const std::vector<std::string>& names() const { return names_; }

 private:
  const CalibrationTargets& targets_;
  const SearchSpace& space_;
  std::vector<std::string> names_;
  std::size_t count_ = 0;
};

double grid_value(const ParamRange& r, int i) {
  if (r.steps <= 1) return r.lo;
  return r.lo + (r.hi - r.lo) * i / (r.steps - 1);
}

}  // namespace

SimCondition condition_from_name(std::string_view name, double id_bits,
                                 std::int64_t release_window_ms) {
  if (name == "trackpad") return SimCondition::trackpad(id_bits);
  constexpr std::string_view prefix = "pad-";
  if (name.substr(0, prefix.size()) == prefix) {
    if (auto profile = AccuracyProfile::preset(name.substr(prefix.size()))) {
      return SimCondition::pad(std::move(*profile), id_bits, release_window_ms);
    }
  }
  throw std::invalid_argument(fmt::format("unknown condition '{}'", name));
}

std::map<std::string, ConditionStats> evaluate_conditions(const SimParams& params,
                                                          const std::vector<std::string>& conditions,
                                                          const SearchSpace& space) {
  std::map<std::string, ConditionStats> out;
  for (std::size_t ci = 0; ci < conditions.size(); ++ci) {
    ConditionStats s;
    double tp = 0.0;
    double strokes = 0.0;
    int errors = 0;
    std::vector<SimCondition> per_id;
    for (double id : space.ids) {
      per_id.push_back(condition_from_name(conditions[ci], id, space.release_window_ms));
    }
    for (int k = 0; k < space.eval_trials; ++k) {
      const std::size_t idx = static_cast<std::size_t>(k) % space.ids.size();
      const auto geo = TrialGeometry::for_id(space.ids[idx]);
      Rng rng = Rng::stream(space.eval_seed, ci + 1, static_cast<std::uint64_t>(k));
      const auto rec = simulate_trial(geo, per_id[idx], params, rng);
      tp += rec.throughput_bps();
      strokes += rec.strokes;
      errors += rec.error ? 1 : 0;
    }
    s.n = space.eval_trials;
    s.mean_tp = tp / s.n;
    s.mean_strokes = strokes / s.n;
    s.error_rate = static_cast<double>(errors) / s.n;
    out[conditions[ci]] = s;
  }
  return out;
}

std::vector<Residual> calibration_residuals(const CalibrationTargets& targets,
                                            const std::map<std::string, ConditionStats>& stats) {
  std::vector<Residual> out;
  const auto add = [&](std::string label, double target, double sim) {
    Residual r{std::move(label), target, sim, 0.0, target != 0.0};
    r.value = r.relative ? std::abs(sim - target) / std::abs(target) : std::abs(sim - target);
    out.push_back(std::move(r));
  };
  for (const auto& c : targets.conditions) {
    const auto it = stats.find(c.condition);
    if (it == stats.end()) continue;
    add(c.condition + ".tp", c.tp_bps, it->second.mean_tp);
    add(c.condition + ".strokes", c.strokes, it->second.mean_strokes);
    add(c.condition + ".error_rate", c.error_rate, it->second.error_rate);
  }
  return out;
}

double calibration_objective(const CalibrationTargets& targets,
                             const std::map<std::string, ConditionStats>& stats) {
  double total = 0.0;
  for (const auto& r : calibration_residuals(targets, stats)) {
    if (r.relative) total += r.value * r.value;
  }
  for (const auto& g : targets.gaps) {
    const auto hi = stats.find(g.high);
    const auto lo = stats.find(g.low);
    if (hi == stats.end() || lo == stats.end()) continue;
    const double excess = (hi->second.mean_tp - lo->second.mean_tp) - g.max_bps;
    if (excess > 0.0) total += kGapPenaltyWeight * excess * excess;
  }
  return total;
}

CalibrationResult calibrate(const CalibrationTargets& targets, const SearchSpace& space,
                            std::uint64_t seed) {
  for (const auto& r : space.free) {
    if (!(r.hi >= r.lo)) {
      throw std::invalid_argument(fmt::format("search range for {} is empty", r.name));
    }
    get_param(space.base, r.name);  // rejects unknown names
  }

  Evaluator eval(targets, space);
  Scored best{space.base, eval(space.base)};
  const auto consider = [&](const SimParams& p) {
    const double obj = eval(p);
    if (obj < best.objective) best = {p, obj};
  };

  if (space.mode == SearchMode::Grid) {
    std::vector<int> idx(space.free.size(), 0);
    while (true) {
      SimParams p = space.base;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        set_param(p, space.free[i].name, grid_value(space.free[i], idx[i]));
      }
      consider(p);
      std::size_t d = 0;
      for (; d < idx.size(); ++d) {
        if (++idx[d] < std::max(1, space.free[d].steps)) break;
        idx[d] = 0;
      }
      if (d == idx.size()) break;
    }
  } else {
    Rng rng(seed);
    for (int s = 0; s < space.samples; ++s) {
      SimParams p = space.base;
      for (const auto& r : space.free) set_param(p, r.name, r.lo + (r.hi - r.lo) * rng.uniform());
      consider(p);
    }
    // Shrinking coordinate search around the incumbent.
    for (int round = 0; round < space.refine_rounds; ++round) {
      for (const auto& r : space.free) {
        const double step = (r.hi - r.lo) / std::pow(2.0, round + 2);
        for (const double dir : {-1.0, 1.0}) {
          SimParams p = best.params;
          const double v = std::clamp(get_param(p, r.name) + dir * step, r.lo, r.hi);
          set_param(p, r.name, v);
          consider(p);
        }
      }
    }
  }

  CalibrationResult out;
  out.params = best.params;
  out.objective = best.objective;
  out.stats = evaluate_conditions(best.params, eval.names(), space);
  out.residuals = calibration_residuals(targets, out.stats);
  out.evaluations = eval.count();
  return out;
}

namespace {

const json& field(const json& obj, const char* key, const char* where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw std::invalid_argument(fmt::format("{}: missing '{}'", where, key));
  }
  return obj[key];
}

json parse_doc(std::string_view text, const char* what) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(fmt::format("{}: not valid JSON: {}", what, e.what()));
  }
  if (!doc.is_object() || !doc.contains("version") || doc["version"] != 1) {
    throw std::invalid_argument(fmt::format("{}: unsupported or missing version (expected 1)", what));
  }
  return doc;
}

}  // namespace

CalibrationTargets parse_targets(std::string_view text) {
  const json doc = parse_doc(text, "targets file");
  CalibrationTargets t;
  try {
    for (const auto& c : field(doc, "conditions", "targets file")) {
      ConditionTarget ct;
      ct.condition = field(c, "condition", "targets file").get<std::string>();
      ct.tp_bps = field(c, "tp_bps", "targets file").get<double>();
      ct.strokes = field(c, "strokes", "targets file").get<double>();
      ct.error_rate = field(c, "error_rate", "targets file").get<double>();
      ct.n_trials = c.value("n_trials", 0);
      condition_from_name(ct.condition, 5.0);
      t.conditions.push_back(std::move(ct));
    }
    if (doc.contains("gaps")) {
      for (const auto& g : doc["gaps"]) {
        t.gaps.push_back({field(g, "high", "targets file").get<std::string>(),
                          field(g, "low", "targets file").get<std::string>(),
                          field(g, "max_bps", "targets file").get<double>()});
      }
    }
  } catch (const json::type_error& e) {
    throw std::invalid_argument(fmt::format("targets file: {}", e.what()));
  }
  if (t.conditions.empty()) throw std::invalid_argument("targets file: no conditions");
  return t;
}

SearchSpace parse_search_space(std::string_view text, const SimParams& base) {
  const json doc = parse_doc(text, "search file");
  SearchSpace s;
  s.base = base;
  try {
    if (doc.contains("base")) {
      json b = doc["base"];
      b["version"] = 1;
      s.base = parse_params(b.dump());
    }
    const auto mode = doc.value("mode", std::string("random"));
    if (mode == "grid") {
      s.mode = SearchMode::Grid;
    } else if (mode == "random") {
      s.mode = SearchMode::Random;
    } else {
      throw std::invalid_argument(fmt::format("search file: unknown mode '{}'", mode));
    }
    s.samples = doc.value("samples", s.samples);
    s.refine_rounds = doc.value("refine_rounds", s.refine_rounds);
    s.eval_trials = doc.value("eval_trials", s.eval_trials);
    s.eval_seed = doc.value("eval_seed", s.eval_seed);
    s.release_window_ms = doc.value("release_window_ms", s.release_window_ms);
    if (doc.contains("ids")) s.ids = doc["ids"].get<std::vector<double>>();
    std::set<std::string> seen;
    for (const auto& r : doc.value("free", json::array())) {
      ParamRange pr;
      pr.name = field(r, "name", "search file").get<std::string>();
      pr.lo = field(r, "lo", "search file").get<double>();
      pr.hi = field(r, "hi", "search file").get<double>();
      pr.steps = r.value("steps", 2);
      get_param(s.base, pr.name);
      if (!(pr.hi >= pr.lo)) {
        throw std::invalid_argument(fmt::format("search file: empty range for '{}'", pr.name));
      }
      if (!seen.insert(pr.name).second) {
        throw std::invalid_argument(fmt::format("search file: '{}' listed twice", pr.name));
      }
      s.free.push_back(std::move(pr));
    }
  } catch (const json::type_error& e) {
    throw std::invalid_argument(fmt::format("search file: {}", e.what()));
  } catch (const ParamsError& e) {
    throw std::invalid_argument(fmt::format("search file: {}", e.what()));
  }
  if (s.eval_trials < 1 || s.ids.empty()) {
    throw std::invalid_argument("search file: eval_trials and ids must be non-empty");
  }
  return s;
}

}  // namespace padbench
