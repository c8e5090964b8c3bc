#include "padbench/usersim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "padbench/pad_core.hpp"
#include "padbench/taskgen.hpp"

namespace padbench {

namespace {

// Lower bound on the multiplicative noise factor; keeps times positive.
constexpr double kMinNoiseFactor = 0.2;
// Accidental discards retried before the trial is abandoned as an error.
constexpr int kMaxChordAttempts = 8;
// Corrective sub-movements are capped so the geometric tail stays finite.
constexpr int kMaxExtraSegments = 8;

double noise_factor(double cv, Rng& rng) {
  return std::max(kMinNoiseFactor, 1.0 + rng.normal(0.0, cv));
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void MotorParams::validate() const {
  require(fitts_b > 0.0, "fitts_b must be positive");
  require(miss_rate >= 0.0 && miss_rate < 1.0, "miss_rate must be in [0, 1)");
  require(mt_noise_cv >= 0.0, "mt_noise_cv must be non-negative");
  require(correction_penalty_ms >= 0.0, "correction_penalty_ms must be non-negative");
  require(extra_segment_prob >= 0.0 && extra_segment_prob < 1.0,
          "extra_segment_prob must be in [0, 1)");
  require(fitts_b_pad >= 0.0, "fitts_b_pad must be non-negative");
}

void DecisionParams::validate() const {
  require(react_ms >= 0.0 && hick_ms_per_bit >= 0.0 && verify_ms_per_option >= 0.0 &&
              cycle_press_ms >= 0.0 && release_gap_mu_ms >= 0.0 && release_gap_sigma_ms >= 0.0,
          "decision timings must be non-negative");
  require(overshoot_prob >= 0.0 && overshoot_prob < 1.0, "overshoot_prob must be in [0, 1)");
}

SimCondition SimCondition::trackpad(double id_bits) {
  return {Device::Trackpad, std::nullopt, id_bits, 170};
}

SimCondition SimCondition::pad(AccuracyProfile profile, double id_bits,
                               std::int64_t release_window_ms) {
  return {Device::Pad, std::move(profile), id_bits, release_window_ms};
}

std::string SimCondition::name() const {
  if (device == Device::Trackpad) return "trackpad";
  return "pad-" + (profile ? profile->name() : std::string("none"));
}

TrialGeometry TrialGeometry::for_id(double id_bits, double width_px) {
  const double a = width_px * (std::exp2(id_bits) - 1.0);
  return {id_bits, a, width_px, a};
}

TrialRecord simulate_trackpad_trial(const TrialGeometry& geo, const MotorParams& params,
                                    Rng& rng) {
  TrialRecord r;
  r.id_bits = geo.id_bits;
  r.amplitude_px = geo.amplitude_px;
  r.width_px = geo.width_px;

  const double f = noise_factor(params.mt_noise_cv, rng);
  double mt = (params.fitts_a + params.fitts_b * geo.id_bits) * f;

  int extra = 0;
  while (extra < kMaxExtraSegments && rng.bernoulli(params.extra_segment_prob)) ++extra;

  r.error = rng.bernoulli(params.miss_rate);
  r.strokes = 1 + extra;
  r.clicks = 1;
  r.pointer_travel_px = geo.distance_px + extra * geo.width_px / 2.0;
  if (r.error) {
    mt += params.correction_penalty_ms;
    r.strokes += 1;
    r.clicks += 1;
    r.pointer_travel_px += geo.width_px;
  }
  r.mt_ms = mt;
  return r;
}

TrialRecord simulate_pad_trial(const TrialGeometry& geo, const SimCondition& condition,
                               const DecisionParams& dp, const MotorParams& mp, Rng& rng) {
  if (condition.device != Device::Pad || !condition.profile) {
    throw std::invalid_argument("PAD trial needs a PAD condition with an accuracy profile");
  }
  const AccuracyProfile& profile = *condition.profile;
  const int n = profile.size();
  const double window = static_cast<double>(condition.release_window_ms);
  const double per_cycle = dp.cycle_press_ms + dp.verify_ms_per_option;

  TrialRecord r;
  r.id_bits = geo.id_bits;
  r.amplitude_px = geo.amplitude_px;
  r.width_px = geo.width_px;
  r.strokes = 0;

  const double f = noise_factor(mp.mt_noise_cv, rng);
  const Rank rank = draw_rank(profile, rng);

  double t = dp.react_ms + dp.hick_ms_per_bit * std::log2(n + 1.0) + mp.fitts_b_pad * geo.id_bits;
  bool settled = false;
  for (int attempt = 0; attempt < kMaxChordAttempts && !settled; ++attempt) {
    if (attempt > 0) t += dp.react_ms + dp.hick_ms_per_bit * std::log2(n + 1.0);
    r.previews += 1;
    r.keypresses += 2;
    r.strokes += 1;

    if (!rank) {
      // Nothing to accept: inspect every suggestion, then release sequentially.
      const int c = n - 1;
      r.cycles += c;
      r.keypresses += c;
      r.strokes += c;
      t += c * per_cycle + window + dp.release_gap_mu_ms;
      r.discards += 1;
      r.error = true;
      settled = true;
      break;
    }

    int c = *rank - 1;
    bool on_wrong = false;
    if (*rank >= 2 && rng.bernoulli(dp.overshoot_prob)) {
      c += 1;
      // The release is already programmed one keystroke after the extra press;
      // the user wraps around only if they recognise the wrong preview first.
      const double detect = rng.exponential(dp.verify_ms_per_option);
      if (detect > dp.cycle_press_ms) {
        on_wrong = true;
      } else {
        c += n - 1;
      }
    }
    r.cycles += c;
    r.keypresses += c;
    r.strokes += c;
    t += c * per_cycle;

    const double gap = std::abs(rng.normal(dp.release_gap_mu_ms, dp.release_gap_sigma_ms));
    t += gap;
    if (classify_release(static_cast<Millis>(std::llround(gap)), condition.release_window_ms) ==
        ReleaseClass::Simultaneous) {
      r.error = on_wrong;
      r.saved_px = geo.distance_px;
      settled = true;
    } else {
      r.discards += 1;
    }
  }
  if (!settled) r.error = true;

  r.mt_ms = t * f;
  return r;
}

TrialRecord simulate_trial(const TrialGeometry& geo, const SimCondition& condition,
                           const SimParams& params, Rng& rng) {
  if (condition.device == Device::Trackpad) return simulate_trackpad_trial(geo, params.motor, rng);
  return simulate_pad_trial(geo, condition, params.decision, params.motor, rng);
}

double learning_multiplier(int j, const RunOptions& options) {
  if (!options.learning_curve || j > 5) return 1.0;
  return 1.0 + options.learning_gain * (6 - j) / 5.0;
}

RunLog simulate_run(const SimCondition& condition, int n_trials, const SimParams& params,
                    std::uint64_t seed, int run_index, const RunOptions& options) {
  params.motor.validate();
  if (condition.device == Device::Pad) params.decision.validate();

  const RingLayout layout = layout_for_id(condition.id_bits, options.width_px, options.n_targets);
  const TrialPlan plan = trial_sequence(layout, n_trials);

  RunLog log;
  log.header.run_id = fmt::format("{}_{}_{}", condition.name(), condition.id_bits, run_index);
  log.header.condition = condition.name();
  log.header.device = condition.device;
  log.header.profile = condition.profile ? condition.profile->name() : "none";
  log.header.seed = seed;

  const int n = layout.n_targets;
  for (int j = 0; j < n_trials; ++j) {
    // The pointer rests on the previous target; trial 1 starts from the
    // target that precedes it in the alternation.
    const int to = plan.order[static_cast<std::size_t>(j)];
    const int from = j == 0 ? (to + n - (n + 1) / 2) % n : plan.order[static_cast<std::size_t>(j - 1)];
    const TrialGeometry geo{condition.id_bits, layout.amplitude, layout.width,
                            distance(layout.target(from), layout.target(to))};
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(run_index),
                          static_cast<std::uint64_t>(j + 1));
    TrialRecord rec = simulate_trial(geo, condition, params, rng);
    rec.trial_idx = j + 1;
    rec.mt_ms *= learning_multiplier(j + 1, options);
    log.records.push_back(rec);
  }
  return log;
}

}  // namespace padbench
