#include "padbench/pad_core.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace padbench {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::optional<Modifier> as_modifier(const KeyId& k) {
  if (k.role == KeyRole::ModA) return Modifier::A;
  if (k.role == KeyRole::ModB) return Modifier::B;
  return std::nullopt;
}

// Which modifiers the phase implies are physically held.
bool modifier_held(const PadPhase& p, Modifier m) {
  return std::visit(
      overloaded{
          [](const phase::Idle&) { return false; },
          [m](const phase::Armed& s) { return s.which == m; },
          [](const phase::Preview&) { return true; },
          [m](const phase::ReleasePending& s) { return s.remaining == m; },
          [m](const phase::Expired& s) { return s.remaining == m; },
      },
      p);
}

struct Transition {
  PadPhase next;
  PadAction action;
};

Transition on_modifier(const PadPhase& p, Modifier m, Edge edge, Millis t,
                       const PadConfig& cfg) {
  const Transition stay{p, action::Noop{}};
  return std::visit(
      overloaded{
          [&](const phase::Idle&) -> Transition {
            if (edge == Edge::Down) return {phase::Armed{m, t}, action::Noop{}};
            return stay;
          },
          [&](const phase::Armed& s) -> Transition {
            if (edge == Edge::Down) {
              // s.which is already held; the repeated-down case is rejected upstream.
              return {phase::Preview{1}, action::EnterPreview{1}};
            }
            if (m == s.which) return {phase::Idle{}, action::Noop{}};
            return stay;
          },
          [&](const phase::Preview& s) -> Transition {
            if (edge == Edge::Up) {
              return {phase::ReleasePending{s.index, t, other_modifier(m)}, action::Noop{}};
            }
            return stay;
          },
          [&](const phase::ReleasePending& s) -> Transition {
            if (edge == Edge::Up && m == s.remaining) {
              if (classify_release(t - s.first_release_t, cfg.release_window_ms) ==
                  ReleaseClass::Simultaneous) {
                return {phase::Idle{}, action::Accept{s.index}};
              }
              return {phase::Idle{}, action::Discard{}};
            }
            if (edge == Edge::Down && m != s.remaining) {
              // Released key pressed again: undo the release, keep the index.
              return {phase::Preview{s.index}, action::Noop{}};
            }
            return stay;
          },
          [&](const phase::Expired& s) -> Transition {
            if (edge == Edge::Up && m == s.remaining) return {phase::Idle{}, action::Noop{}};
            if (edge == Edge::Down && m != s.remaining) {
              // Both modifiers held again: a fresh chord.
              return {phase::Preview{1}, action::EnterPreview{1}};
            }
            return stay;
          },
      },
      p);
}

Transition on_cycle(const PadPhase& p, const PadConfig& cfg) {
  if (const auto* s = std::get_if<phase::Preview>(&p)) {
    const int next = (s->index % cfg.max_candidates) + 1;
    return {phase::Preview{next}, action::Cycle{next}};
  }
  return {p, action::Noop{}};
}

Transition on_timeout(const PadPhase& p, Millis t, const PadConfig& cfg) {
  if (const auto* s = std::get_if<phase::ReleasePending>(&p)) {
    if (cfg.emit_discard_on_timeout && t >= s->first_release_t + cfg.release_window_ms) {
      return {phase::Expired{s->remaining}, action::Discard{}};
    }
  }
  return {p, action::Noop{}};
}

}  // namespace

void PadConfig::validate() const {
  if (release_window_ms <= 0) {
    throw std::invalid_argument(
        fmt::format("release_window_ms must be positive, got {}", release_window_ms));
  }
  if (max_candidates < 1) {
    throw std::invalid_argument(
        fmt::format("max_candidates must be at least 1, got {}", max_candidates));
  }
}

ReleaseClass classify_release(Millis delta_ms, Millis window_ms) {
  return delta_ms <= window_ms ? ReleaseClass::Simultaneous : ReleaseClass::Sequential;
}

StepResult step(const PadState& state, const KeyEvent& event, const PadConfig& config) {
  if (state.last_t && event.t < *state.last_t) {
    return {state, action::Noop{}, StreamFault::NonMonotonicTime};
  }

  PadState next = state;
  next.last_t = event.t;
  Transition tr{state.phase, action::Noop{}};

  if (const auto mod = as_modifier(event.key)) {
    if (event.edge == Edge::Down && modifier_held(state.phase, *mod)) {
      return {state, action::Noop{}, StreamFault::RepeatedDown};
    }
    tr = on_modifier(state.phase, *mod, event.edge, event.t, config);
  } else if (event.key.role == KeyRole::Timeout) {
    // Timeout is synthetic and carries no held/released state.
    if (event.edge == Edge::Down) tr = on_timeout(state.phase, event.t, config);
  } else {
    const auto pos = std::lower_bound(next.held.begin(), next.held.end(), event.key);
    const bool is_held = pos != next.held.end() && *pos == event.key;
    if (event.edge == Edge::Down) {
      if (is_held) return {state, action::Noop{}, StreamFault::RepeatedDown};
      next.held.insert(pos, event.key);
      if (event.key.role == KeyRole::Cycle) tr = on_cycle(state.phase, config);
    } else if (is_held) {
      next.held.erase(pos);
    }
  }

  next.phase = std::move(tr.next);
  return {std::move(next), tr.action, std::nullopt};
}

std::optional<Millis> next_deadline(const PadState& state, const PadConfig& config) {
  if (const auto* s = std::get_if<phase::ReleasePending>(&state.phase)) {
    return s->first_release_t + config.release_window_ms;
  }
  return std::nullopt;
}

ReplayError::ReplayError(std::size_t index, StreamFault fault)
    : std::runtime_error(fmt::format("event {}: {}", index, to_string(fault))),
      index_(index),
      fault_(fault) {}

std::vector<TimedAction> replay(const std::vector<KeyEvent>& events, const PadConfig& config) {
  config.validate();
  std::vector<TimedAction> out;
  PadState state;
  for (std::size_t i = 0; i < events.size(); ++i) {
    auto r = step(state, events[i], config);
    if (r.fault) throw ReplayError(i, *r.fault);
    if (!is_noop(r.action)) out.push_back({r.action, events[i].t});
    state = std::move(r.state);
  }
  return out;
}

bool is_noop(const PadAction& a) { return std::holds_alternative<action::Noop>(a); }

std::string to_string(const PadAction& a) {
  return std::visit(
      overloaded{
          [](const action::EnterPreview&) { return std::string("EnterPreview"); },
          [](const action::Cycle& c) { return fmt::format("Cycle{{{}}}", c.new_index); },
          [](const action::Accept& c) { return fmt::format("Accept{{{}}}", c.index); },
          [](const action::Discard&) { return std::string("Discard"); },
          [](const action::Noop&) { return std::string("Noop"); },
      },
      a);
}

std::string to_string(StreamFault f) {
  switch (f) {
    case StreamFault::NonMonotonicTime:
      return "timestamp decreases";
    case StreamFault::RepeatedDown:
      return "down edge for a key already down";
  }
  return "unknown fault";
}

std::string to_string(const PadPhase& p) {
  const auto mod = [](Modifier m) { return m == Modifier::A ? "A" : "B"; };
  return std::visit(
      overloaded{
          [](const phase::Idle&) { return std::string("Idle"); },
          [&](const phase::Armed& s) { return fmt::format("Armed{{{}}}", mod(s.which)); },
          [](const phase::Preview& s) { return fmt::format("Preview{{{}}}", s.index); },
          [&](const phase::ReleasePending& s) {
            return fmt::format("ReleasePending{{{},{},{}}}", s.index, s.first_release_t,
                               mod(s.remaining));
          },
          [&](const phase::Expired& s) { return fmt::format("Expired{{{}}}", mod(s.remaining)); },
      },
      p);
}

}  // namespace padbench
