#pragma once

// Synthetic-user Monte Carlo model for ISO 9241-9 trials.
//
// Trackpad trials follow Fitts's law with multiplicative timing noise. PAD
// trials follow a decision-plus-pointing decomposition:
//
//   mt = react + hick * log2(N + 1) + fitts_b_pad * ID
//        + cycles * (cycle_press + verify) + |release gap|
//
// with retries appended when the release gap exceeds the release window.
// This decomposition is a model chosen to reproduce the reported aggregates;
// it is not a measured ground truth.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "padbench/prediction.hpp"
#include "padbench/rng.hpp"
#include "padbench/run_log.hpp"

namespace padbench {

struct MotorParams {
  double fitts_a = 0.0;                // ms
  double fitts_b = 0.0;                // ms/bit
  double mt_noise_cv = 0.0;            // sd of the multiplicative timing noise
  double miss_rate = 0.0;              // trackpad click outside the target
  double correction_penalty_ms = 0.0;  // added when a miss is corrected
  double extra_segment_prob = 0.0;     // continuation prob. of corrective sub-movements
  double fitts_b_pad = 0.0;            // ms/bit, residual distance coupling under PAD

  void validate() const;
  friend bool operator==(const MotorParams&, const MotorParams&) = default;
};

struct DecisionParams {
  double react_ms = 0.0;              // cue to chord press
  double hick_ms_per_bit = 0.0;       // entry cost, times log2(N + 1)
  double verify_ms_per_option = 0.0;  // inspecting one previewed suggestion
  double cycle_press_ms = 0.0;        // one cycle keystroke
  double release_gap_mu_ms = 0.0;     // intended-simultaneous release differential
  double release_gap_sigma_ms = 0.0;
  double overshoot_prob = 0.0;        // cycling past the right suggestion once

  void validate() const;
  friend bool operator==(const DecisionParams&, const DecisionParams&) = default;
};

struct SimParams {
  MotorParams motor;
  DecisionParams decision;
  friend bool operator==(const SimParams&, const SimParams&) = default;
};

struct SimCondition {
  Device device = Device::Trackpad;
  std::optional<AccuracyProfile> profile;  // PAD only
  double id_bits = 5.0;
  std::int64_t release_window_ms = 170;

  static SimCondition trackpad(double id_bits);
  static SimCondition pad(AccuracyProfile profile, double id_bits,
                          std::int64_t release_window_ms = 170);

  /// "trackpad", or "pad-<profile name>".
  std::string name() const;
};

/// Geometry of one movement: nominal ID and target size, plus the distance
/// from where the pointer rests to the target centre.
struct TrialGeometry {
  double id_bits = 5.0;
  double amplitude_px = 0.0;
  double width_px = 0.0;
  double distance_px = 0.0;

  /// Amplitude from the ID at the given width; distance equal to amplitude.
  static TrialGeometry for_id(double id_bits, double width_px = 50.0);
};

TrialRecord simulate_trackpad_trial(const TrialGeometry& geo, const MotorParams& params,
                                    Rng& rng);

TrialRecord simulate_pad_trial(const TrialGeometry& geo, const SimCondition& condition,
                               const DecisionParams& dparams, const MotorParams& mparams,
                               Rng& rng);

/// Dispatches on condition.device.
TrialRecord simulate_trial(const TrialGeometry& geo, const SimCondition& condition,
                           const SimParams& params, Rng& rng);

struct RunOptions {
  int n_targets = 9;
  double width_px = 50.0;
  /// Multiplies movement time by 1 + gain * (6 - j) / 5 for trials j <= 5.
  bool learning_curve = false;
  double learning_gain = 0.4;
};

/// Learning multiplier for one-based trial j; 1 when learning is off.
double learning_multiplier(int j, const RunOptions& options);

/// Simulates one run over an ISO ring at the condition's ID. Trial j draws
/// from Rng::stream(seed, run_index, j), so runs are reproducible and
/// independent of evaluation order.
RunLog simulate_run(const SimCondition& condition, int n_trials, const SimParams& params,
                    std::uint64_t seed, int run_index = 1, const RunOptions& options = {});

/// Parameters found by calibrating against the reported aggregates; identical
/// to data/calibration/default_params.json.
SimParams default_params();

}  // namespace padbench
