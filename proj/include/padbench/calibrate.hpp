#pragma once

// Fits simulator parameters to aggregate targets (mean throughput, mean
// strokes and error rate per condition) by grid or random search followed by
// a shrinking coordinate search. Every candidate is scored on the same
// evaluation seed, so comparisons between candidates are noise-free.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "padbench/usersim.hpp"

namespace padbench {

struct ConditionTarget {
  std::string condition;  // "trackpad", "pad-ideal", "pad-uniform3", ...
  double tp_bps = 0.0;
  double strokes = 0.0;
  double error_rate = 0.0;
  int n_trials = 0;  // trials behind the reported numbers
};

/// Upper bound on TP(high) - TP(low), enforced as a penalty.
struct GapConstraint {
  std::string high;
  std::string low;
  double max_bps = 0.0;
};

struct CalibrationTargets {
  std::vector<ConditionTarget> conditions;
  std::vector<GapConstraint> gaps;
};

struct ParamRange {
  std::string name;  // dotted, e.g. "decision.overshoot_prob"
  double lo = 0.0;
  double hi = 0.0;
  int steps = 2;  // grid points in grid mode
};

enum class SearchMode { Grid, Random };

struct SearchSpace {
  SimParams base;
  std::vector<ParamRange> free;
  SearchMode mode = SearchMode::Random;
  int samples = 300;       // random mode
  int refine_rounds = 6;   // random mode
  int eval_trials = 3000;  // per condition
  std::uint64_t eval_seed = 1;
  std::vector<double> ids = {4.0, 5.0, 6.0};
  std::int64_t release_window_ms = 170;
};

struct ConditionStats {
  int n = 0;
  double mean_tp = 0.0;
  double mean_strokes = 0.0;
  double error_rate = 0.0;
};

struct Residual {
  std::string label;  // e.g. "pad-ideal.tp"
  double target = 0.0;
  double simulated = 0.0;
  /// Relative error |sim - target| / target; absolute difference when the
  /// target is zero (such entries are reported but not optimized).
  double value = 0.0;
  bool relative = true;
};

struct CalibrationResult {
  SimParams params;
  std::vector<Residual> residuals;
  std::map<std::string, ConditionStats> stats;
  double objective = 0.0;
  std::size_t evaluations = 0;
};

/// Resolves "trackpad" and "pad-<preset>" names.
SimCondition condition_from_name(std::string_view name, double id_bits,
                                 std::int64_t release_window_ms = 170);

std::map<std::string, ConditionStats> evaluate_conditions(const SimParams& params,
                                                          const std::vector<std::string>& conditions,
                                                          const SearchSpace& space);

/// Squared relative errors over every non-zero target plus gap penalties.
double calibration_objective(const CalibrationTargets& targets,
                             const std::map<std::string, ConditionStats>& stats);

std::vector<Residual> calibration_residuals(const CalibrationTargets& targets,
                                            const std::map<std::string, ConditionStats>& stats);

CalibrationResult calibrate(const CalibrationTargets& targets, const SearchSpace& space,
                            std::uint64_t seed);

CalibrationTargets parse_targets(std::string_view text);
/// The base parameters come from `base` unless the document lists them.
SearchSpace parse_search_space(std::string_view text, const SimParams& base);

}  // namespace padbench
