#include "padbench/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "json.hpp"

namespace padbench {

using nlohmann::json;

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

const Target* Screen::find(std::string_view id) const {
  const auto it =
      std::find_if(targets.begin(), targets.end(), [&](const Target& t) { return t.id == id; });
  return it == targets.end() ? nullptr : &*it;
}

const Screen* Scenario::find(std::string_view name) const {
  const auto it =
      std::find_if(screens.begin(), screens.end(), [&](const Screen& s) { return s.name == name; });
  return it == screens.end() ? nullptr : &*it;
}

AccuracyProfile::AccuracyProfile(std::string name, std::vector<double> p)
    : name_(std::move(name)), p_(std::move(p)) {
  if (p_.empty()) throw std::invalid_argument("accuracy profile needs at least one rank");
  double total = 0.0;
  for (std::size_t i = 0; i < p_.size(); ++i) {
    if (!(p_[i] >= 0.0) || !std::isfinite(p_[i])) {
      throw std::invalid_argument(
          fmt::format("accuracy profile entry {} is not a probability: {}", i + 1, p_[i]));
    }
    total += p_[i];
  }
  // Allow rounding slack for hand-written decimal profiles such as 1/3 written out.
  if (total > 1.0 + 1e-9) {
    throw std::invalid_argument(fmt::format("accuracy profile mass {} exceeds 1", total));
  }
  miss_mass_ = std::max(0.0, 1.0 - total);
  if (miss_mass_ < 1e-12) miss_mass_ = 0.0;
}

AccuracyProfile AccuracyProfile::ideal() { return {"ideal", {0.95, 0.04, 0.01}}; }

AccuracyProfile AccuracyProfile::uniform3() { return {"uniform3", {1.0 / 3, 1.0 / 3, 1.0 / 3}}; }

std::optional<AccuracyProfile> AccuracyProfile::preset(std::string_view name) {
  if (name == "ideal") return ideal();
  if (name == "uniform3") return uniform3();
  return std::nullopt;
}

std::vector<std::string> AccuracyProfile::preset_names() { return {"ideal", "uniform3"}; }

Rank draw_rank(const AccuracyProfile& profile, Rng& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  const auto& p = profile.p();
  for (std::size_t r = 0; r < p.size(); ++r) {
    cum += p[r];
    if (u < cum) return static_cast<int>(r + 1);
  }
  if (profile.miss_mass() == 0.0) {
    // Cumulative rounding left u just above the sum; the last non-zero rank owns it.
    for (std::size_t r = p.size(); r-- > 0;) {
      if (p[r] > 0.0) return static_cast<int>(r + 1);
    }
  }
  return std::nullopt;
}

RankedSuggestions scripted_ranking(const Screen& screen, std::string_view true_target) {
  RankedSuggestions out;
  if (screen.scripted_ranking) {
    for (const auto& id : *screen.scripted_ranking) out.entries.push_back(screen.find(id));
  } else {
    const auto n = std::min<std::size_t>(screen.targets.size(),
                                         static_cast<std::size_t>(screen.max_candidates));
    for (std::size_t i = 0; i < n; ++i) out.entries.push_back(&screen.targets[i]);
  }
  for (std::size_t i = 0; i < out.entries.size(); ++i) {
    if (out.entries[i] && out.entries[i]->id == true_target) {
      out.true_rank = static_cast<int>(i + 1);
      break;
    }
  }
  return out;
}

RankedSuggestions rank_targets(const Screen& screen, std::string_view true_target,
                               const AccuracyProfile& profile, Rng& rng) {
  const Target* truth = screen.find(true_target);
  if (!truth) {
    throw std::invalid_argument(
        fmt::format("target '{}' is not on screen '{}'", true_target, screen.name));
  }
  if (screen.scripted_ranking) return scripted_ranking(screen, true_target);

  const int n = std::min(profile.size(), screen.max_candidates);
  Rank rank = draw_rank(profile, rng);
  if (rank && *rank > n) rank.reset();

  std::vector<const Target*> pool;
  for (const auto& t : screen.targets) {
    if (&t != truth) pool.push_back(&t);
  }
  const std::size_t want_fillers = static_cast<std::size_t>(rank ? n - 1 : n);
  const std::size_t fillers = std::min(want_fillers, pool.size());
  // Partial Fisher-Yates: the first `fillers` slots become a uniform sample.
  for (std::size_t i = 0; i < fillers; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(fillers);

  RankedSuggestions out;
  out.entries = std::move(pool);
  if (rank) {
    const auto pos = std::min(static_cast<std::size_t>(*rank - 1), out.entries.size());
    out.entries.insert(out.entries.begin() + static_cast<std::ptrdiff_t>(pos), truth);
    out.true_rank = static_cast<int>(pos + 1);
  }
  return out;
}

ScenarioError::ScenarioError(std::string path, const std::string& what)
    : std::runtime_error(path.empty() ? what : fmt::format("{}: {}", path, what)),
      path_(std::move(path)) {}

namespace {

const json& require(const json& obj, const std::string& key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ScenarioError(path, fmt::format("missing field '{}'", key));
  return *it;
}

double require_number(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_number()) throw ScenarioError(path + "." + key, "expected a number");
  return v.get<double>();
}

std::string require_string(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_string()) throw ScenarioError(path.empty() ? key : path + "." + key, "expected a string");
  return v.get<std::string>();
}

Target parse_target(const json& j, const std::string& path) {
  if (!j.is_object()) throw ScenarioError(path, "expected an object");
  Target t;
  t.id = require_string(j, "id", path);
  t.label = j.contains("label") ? require_string(j, "label", path) : t.id;
  t.center = {require_number(j, "x", path), require_number(j, "y", path)};
  t.width = require_number(j, "w", path);
  t.height = require_number(j, "h", path);
  if (!(t.width > 0.0)) throw ScenarioError(path + ".w", "width must be positive");
  if (!(t.height > 0.0)) throw ScenarioError(path + ".h", "height must be positive");
  return t;
}

Screen parse_screen(const json& j, const std::string& path) {
  if (!j.is_object()) throw ScenarioError(path, "expected an object");
  Screen s;
  s.name = require_string(j, "name", path);

  const auto& targets = require(j, "targets", path);
  if (!targets.is_array() || targets.empty()) {
    throw ScenarioError(path + ".targets", "expected a non-empty array");
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto tpath = fmt::format("{}.targets[{}]", path, i);
    s.targets.push_back(parse_target(targets[i], tpath));
    if (!ids.insert(s.targets.back().id).second) {
      throw ScenarioError(tpath + ".id",
                          fmt::format("duplicate target id '{}'", s.targets.back().id));
    }
  }

  const auto& mc = require(j, "max_candidates", path);
  if (!mc.is_number_integer()) throw ScenarioError(path + ".max_candidates", "expected an integer");
  s.max_candidates = mc.get<int>();
  if (s.max_candidates < 1 || static_cast<std::size_t>(s.max_candidates) > s.targets.size()) {
    throw ScenarioError(path + ".max_candidates",
                        fmt::format("must be between 1 and the target count {}", s.targets.size()));
  }

  if (j.contains("transitions")) {
    const auto& tr = j["transitions"];
    if (!tr.is_object()) throw ScenarioError(path + ".transitions", "expected an object");
    for (const auto& [id, dest] : tr.items()) {
      const auto tpath = fmt::format("{}.transitions.{}", path, id);
      if (!ids.count(id)) throw ScenarioError(tpath, fmt::format("unknown target id '{}'", id));
      if (!dest.is_string()) throw ScenarioError(tpath, "expected a screen name");
      s.transitions.emplace(id, dest.get<std::string>());
    }
  }

  if (j.contains("scripted_ranking") && !j["scripted_ranking"].is_null()) {
    const auto& sr = j["scripted_ranking"];
    const auto spath = path + ".scripted_ranking";
    if (!sr.is_array() || sr.empty()) throw ScenarioError(spath, "expected a non-empty array");
    if (sr.size() > static_cast<std::size_t>(s.max_candidates)) {
      throw ScenarioError(spath, fmt::format("longer than max_candidates {}", s.max_candidates));
    }
    std::vector<std::string> ranking;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < sr.size(); ++i) {
      const auto epath = fmt::format("{}[{}]", spath, i);
      if (!sr[i].is_string()) throw ScenarioError(epath, "expected a target id");
      auto id = sr[i].get<std::string>();
      if (!ids.count(id)) throw ScenarioError(epath, fmt::format("unknown target id '{}'", id));
      if (!seen.insert(id).second) throw ScenarioError(epath, fmt::format("repeated id '{}'", id));
      ranking.push_back(std::move(id));
    }
    s.scripted_ranking = std::move(ranking);
  }
  return s;
}

}  // namespace

Scenario load_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("", fmt::format("not a valid document: {}", e.what()));
  }
  if (!doc.is_object()) throw ScenarioError("", "top level must be an object");

  const auto& version = require(doc, "version", "");
  if (!version.is_number_integer() || version.get<int>() != 1) {
    throw ScenarioError("version", "unsupported schema version (expected 1)");
  }

  Scenario sc;
  sc.start = require_string(doc, "start", "");
  if (doc.contains("cursor")) {
    const auto& c = doc["cursor"];
    if (!c.is_object()) throw ScenarioError("cursor", "expected an object");
    sc.cursor = {require_number(c, "x", "cursor"), require_number(c, "y", "cursor")};
  }

  const auto& screens = require(doc, "screens", "");
  if (!screens.is_array() || screens.empty()) {
    throw ScenarioError("screens", "expected a non-empty array");
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < screens.size(); ++i) {
    const auto spath = fmt::format("screens[{}]", i);
    sc.screens.push_back(parse_screen(screens[i], spath));
    if (!names.insert(sc.screens.back().name).second) {
      throw ScenarioError(spath + ".name",
                          fmt::format("duplicate screen name '{}'", sc.screens.back().name));
    }
  }

  if (!names.count(sc.start)) {
    throw ScenarioError("start", fmt::format("unknown screen '{}'", sc.start));
  }
  for (std::size_t i = 0; i < sc.screens.size(); ++i) {
    for (const auto& [id, dest] : sc.screens[i].transitions) {
      if (dest != kTerminal && !names.count(dest)) {
        throw ScenarioError(fmt::format("screens[{}].transitions.{}", i, id),
                            fmt::format("transition to unknown screen '{}'", dest));
      }
    }
  }
  return sc;
}

}  // namespace padbench
