#pragma once

// Drives a scripted scenario (e.g. the email mockup) with a recorded key
// stream: pad-core interprets the keys, scripted rankings say which target
// each index previews, and accepted targets move the session between screens.

#include <optional>
#include <string>
#include <vector>

#include "padbench/pad_core.hpp"
#include "padbench/prediction.hpp"
#include "padbench/run_log.hpp"

namespace padbench {

struct SessionStep {
  std::string screen;
  std::string target_id;  // previewed target when the engagement ended
  bool accepted = false;
  Millis t = 0;
  double saved_px = 0.0;
};

struct SessionResult {
  /// One record per chord engagement (EnterPreview through Accept/Discard).
  RunLog log;
  std::vector<SessionStep> steps;
  std::string final_screen;  // kTerminal once the flow has ended
  bool completed = false;
};

/// Replays `events` over the scenario. The candidate count on each screen is
/// the length of its scripted ranking; `base` supplies the release window.
/// When `intended` is given, an accept of any other target is logged as an
/// error. Throws ReplayError on an invalid stream.
SessionResult replay_scenario(const Scenario& scenario, const std::vector<KeyEvent>& events,
                              const PadConfig& base,
                              const std::optional<std::vector<std::string>>& intended = {});

struct ScriptTiming {
  Millis start = 0;
  Millis chord_stagger = 40;   // second modifier after the first
  Millis dwell = 400;          // preview inspection before cycling or releasing
  Millis release_gap = 30;     // second modifier release after the first
  Millis between_tasks = 600;  // pause after each accept
};

/// Key stream of an ideal user accepting each target in turn: chord, cycle to
/// the target's scripted rank, release both modifiers together. Throws
/// std::invalid_argument if a target is not offered on the screen reached.
std::vector<KeyEvent> script_accepts(const Scenario& scenario,
                                     const std::vector<std::string>& targets,
                                     const ScriptTiming& timing = {});

}  // namespace padbench
