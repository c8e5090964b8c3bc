#pragma once

// Simulated predictive layer. Rankings are not learned: the rank of the true
// target is drawn from an AccuracyProfile, or taken verbatim from a scenario's
// scripted ranking.

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "padbench/rng.hpp"

namespace padbench {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

double distance(const Point& a, const Point& b);

struct Target {
  std::string id;
  std::string label;
  Point center;
  double width = 0.0;
  double height = 0.0;
};

inline constexpr std::string_view kTerminal = "END";

struct Screen {
  std::string name;
  std::vector<Target> targets;
  int max_candidates = 6;
  /// target id -> next screen name, or kTerminal.
  std::map<std::string, std::string> transitions;
  /// Fixed ranking (target ids) that overrides any accuracy profile.
  std::optional<std::vector<std::string>> scripted_ranking;

  const Target* find(std::string_view id) const;
};

struct Scenario {
  int version = 1;
  std::string start;
  /// Where the pointer rests while the user drives the screen by keyboard.
  Point cursor;
  std::vector<Screen> screens;

  const Screen* find(std::string_view name) const;
};

/// One-based rank of the true target; nullopt means the predictor missed it.
using Rank = std::optional<int>;

class AccuracyProfile {
 public:
  /// Throws std::invalid_argument on a negative entry, an empty vector or a
  /// total mass above one.
  AccuracyProfile(std::string name, std::vector<double> p);

  /// 95% / 4% / 1% over the top three suggestions.
  static AccuracyProfile ideal();
  /// One third on each of the top three suggestions.
  static AccuracyProfile uniform3();
  /// Resolves "ideal" / "uniform3"; nullopt for unknown names.
  static std::optional<AccuracyProfile> preset(std::string_view name);
  static std::vector<std::string> preset_names();

  const std::string& name() const { return name_; }
  const std::vector<double>& p() const { return p_; }
  int size() const { return static_cast<int>(p_.size()); }
  double miss_mass() const { return miss_mass_; }

 private:
  std::string name_;
  std::vector<double> p_;
  double miss_mass_ = 0.0;
};

Rank draw_rank(const AccuracyProfile& profile, Rng& rng);

struct RankedSuggestions {
  std::vector<const Target*> entries;
  Rank true_rank;
};

/// Places the true target at a drawn rank and fills the remaining slots with
/// distinct other targets chosen uniformly without replacement. N is
/// min(profile size, screen.max_candidates); a drawn rank beyond N counts as a
/// miss. A scripted ranking, when present, is returned verbatim.
RankedSuggestions rank_targets(const Screen& screen, std::string_view true_target,
                               const AccuracyProfile& profile, Rng& rng);

/// Ranking for a screen without randomness: the scripted ranking, or the
/// first max_candidates targets in document order.
RankedSuggestions scripted_ranking(const Screen& screen, std::string_view true_target);

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string path, const std::string& what);
  /// JSON-pointer-like location of the offending element, e.g. "screens[1].targets[0].w".
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Parses and validates a scenario document (JSON, schema version 1).
Scenario load_scenario(std::string_view text);

}  // namespace padbench
