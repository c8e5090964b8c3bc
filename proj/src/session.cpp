#include "padbench/session.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "padbench/taskgen.hpp"

namespace padbench {

namespace {

PadConfig screen_config(const Screen& screen, const PadConfig& base) {
  PadConfig cfg = base;
  cfg.max_candidates = std::max<int>(1, static_cast<int>(scripted_ranking(screen, "").entries.size()));
  return cfg;
}

const Target* ranked(const Screen& screen, int index) {
  const auto r = scripted_ranking(screen, "");
  if (index < 1 || static_cast<std::size_t>(index) > r.entries.size()) return nullptr;
  return r.entries[static_cast<std::size_t>(index - 1)];
}

}  // namespace

SessionResult replay_scenario(const Scenario& scenario, const std::vector<KeyEvent>& events,
                              const PadConfig& base,
                              const std::optional<std::vector<std::string>>& intended) {
  base.validate();
  SessionResult out;
  out.log.header = {"email-session", "pad-scripted", Device::Pad, "scripted", 0,
                    kRunLogSchemaVersion};

  const Screen* screen = scenario.find(scenario.start);
  PadState state;
  std::optional<TrialRecord> open;
  Millis engagement_start = 0;
  int index = 1;
  std::size_t accepts_seen = 0;

  for (std::size_t i = 0; i < events.size(); ++i) {
    const KeyEvent& ev = events[i];
    const bool was_idle = std::holds_alternative<phase::Idle>(state.phase);
    const PadConfig cfg = screen ? screen_config(*screen, base) : base;
    auto res = step(state, ev, cfg);
    if (res.fault) throw ReplayError(i, *res.fault);
    state = std::move(res.state);

    if (was_idle && !std::holds_alternative<phase::Idle>(state.phase)) engagement_start = ev.t;
    if (open && ev.edge == Edge::Down && ev.key.role != KeyRole::Timeout) open->keypresses += 1;

    if (const auto* a = std::get_if<action::EnterPreview>(&res.action)) {
      TrialRecord rec;
      rec.trial_idx = static_cast<int>(out.log.records.size()) + 1;
      rec.strokes = 1;
      rec.previews = 1;
      // Both modifier presses of the chord belong to the engagement.
      rec.keypresses = 2;
      open = rec;
      index = a->index;
    } else if (const auto* c = std::get_if<action::Cycle>(&res.action)) {
      if (open) {
        open->cycles += 1;
        open->strokes += 1;
      }
      index = c->new_index;
    } else if (std::holds_alternative<action::Accept>(res.action) ||
               std::holds_alternative<action::Discard>(res.action)) {
      const bool accepted = std::holds_alternative<action::Accept>(res.action);
      if (accepted) index = std::get<action::Accept>(res.action).index;
      const Target* target = screen ? ranked(*screen, index) : nullptr;
      if (open && target) {
        TrialRecord rec = *open;
        const double dist = distance(scenario.cursor, target->center);
        const double w = std::min(target->width, target->height);
        rec.amplitude_px = dist;
        rec.width_px = w;
        rec.id_bits = dist > 0.0 ? index_of_difficulty(dist, w) : 0.0;
        rec.mt_ms = static_cast<double>(ev.t - engagement_start);
        if (accepted) {
          rec.saved_px = dist;
          if (intended) {
            rec.error = accepts_seen >= intended->size() || (*intended)[accepts_seen] != target->id;
          }
          ++accepts_seen;
        } else {
          rec.discards = 1;
        }
        out.log.records.push_back(rec);
        out.steps.push_back({screen->name, target->id, accepted, ev.t, rec.saved_px});

        if (accepted) {
          const auto tr = screen->transitions.find(target->id);
          if (tr != screen->transitions.end()) {
            if (tr->second == kTerminal) {
              screen = nullptr;
              out.completed = true;
            } else {
              screen = scenario.find(tr->second);
            }
          }
        }
      }
      open.reset();
    }
  }
  out.final_screen = screen ? screen->name : std::string(kTerminal);
  return out;
}

std::vector<KeyEvent> script_accepts(const Scenario& scenario,
                                     const std::vector<std::string>& targets,
                                     const ScriptTiming& timing) {
  std::vector<KeyEvent> ev;
  const Screen* screen = scenario.find(scenario.start);
  Millis t = timing.start;
  for (const auto& id : targets) {
    if (!screen) throw std::invalid_argument(fmt::format("flow ended before target '{}'", id));
    const auto ranking = scripted_ranking(*screen, id);
    if (!ranking.true_rank) {
      throw std::invalid_argument(
          fmt::format("target '{}' is not offered on screen '{}'", id, screen->name));
    }
    ev.push_back({KeyId::mod_a(), Edge::Down, t});
    t += timing.chord_stagger;
    ev.push_back({KeyId::mod_b(), Edge::Down, t});
    for (int c = 1; c < *ranking.true_rank; ++c) {
      t += timing.dwell;
      ev.push_back({KeyId::cycle(), Edge::Down, t});
      ev.push_back({KeyId::cycle(), Edge::Up, t + 50});
    }
    t += timing.dwell + 50;
    ev.push_back({KeyId::mod_a(), Edge::Up, t});
    t += timing.release_gap;
    ev.push_back({KeyId::mod_b(), Edge::Up, t});
    t += timing.between_tasks;

    const auto tr = screen->transitions.find(id);
    if (tr != screen->transitions.end()) {
      screen = tr->second == kTerminal ? nullptr : scenario.find(tr->second);
    }
  }
  return ev;
}

}  // namespace padbench
