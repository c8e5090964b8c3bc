#pragma once

// Preview-Accept-Discard interaction grammar.
//
// The engine is a pure finite-state machine: it owns no clock, no timers and
// no I/O. Hosts feed timestamped key edges through step() and act on the
// returned PadAction. A discard that should resolve before the second key is
// released is driven by injecting a Timeout key event at next_deadline().

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace padbench {

using Millis = std::int64_t;

enum class KeyRole : std::uint8_t { ModA, ModB, Cycle, Timeout, Other };

/// Semantic key role. `code` is only meaningful for Other.
struct KeyId {
  KeyRole role = KeyRole::Other;
  int code = 0;

  static constexpr KeyId mod_a() { return {KeyRole::ModA, 0}; }
  static constexpr KeyId mod_b() { return {KeyRole::ModB, 0}; }
  static constexpr KeyId cycle() { return {KeyRole::Cycle, 0}; }
  static constexpr KeyId timeout() { return {KeyRole::Timeout, 0}; }
  static constexpr KeyId other(int c) { return {KeyRole::Other, c}; }

  friend constexpr bool operator==(const KeyId&, const KeyId&) = default;
  friend constexpr auto operator<=>(const KeyId&, const KeyId&) = default;
};

enum class Edge : std::uint8_t { Down, Up };

struct KeyEvent {
  KeyId key;
  Edge edge = Edge::Down;
  Millis t = 0;

  friend bool operator==(const KeyEvent&, const KeyEvent&) = default;
};

struct PadConfig {
  Millis release_window_ms = 170;
  int max_candidates = 6;
  bool emit_discard_on_timeout = true;

  /// Throws std::invalid_argument on a non-positive window or N < 1.
  void validate() const;
};

enum class Modifier : std::uint8_t { A, B };

constexpr Modifier other_modifier(Modifier m) {
  return m == Modifier::A ? Modifier::B : Modifier::A;
}

namespace phase {
struct Idle {
  friend bool operator==(const Idle&, const Idle&) = default;
};
struct Armed {
  Modifier which = Modifier::A;
  Millis t_down = 0;
  friend bool operator==(const Armed&, const Armed&) = default;
};
struct Preview {
  int index = 1;
  friend bool operator==(const Preview&, const Preview&) = default;
};
struct ReleasePending {
  int index = 1;
  Millis first_release_t = 0;
  Modifier remaining = Modifier::A;
  friend bool operator==(const ReleasePending&, const ReleasePending&) = default;
};
struct Expired {
  Modifier remaining = Modifier::A;
  friend bool operator==(const Expired&, const Expired&) = default;
};
}  // namespace phase

using PadPhase = std::variant<phase::Idle, phase::Armed, phase::Preview,
                              phase::ReleasePending, phase::Expired>;

/// Full engine state: the grammar phase plus the bookkeeping needed to
/// validate the event stream (last timestamp, non-modifier keys held down).
struct PadState {
  PadPhase phase = phase::Idle{};
  std::optional<Millis> last_t;
  std::vector<KeyId> held;  // sorted; Cycle and Other keys only

  friend bool operator==(const PadState&, const PadState&) = default;
};

namespace action {
struct EnterPreview {
  int index = 1;
  friend bool operator==(const EnterPreview&, const EnterPreview&) = default;
};
struct Cycle {
  int new_index = 1;
  friend bool operator==(const Cycle&, const Cycle&) = default;
};
struct Accept {
  int index = 1;
  friend bool operator==(const Accept&, const Accept&) = default;
};
struct Discard {
  friend bool operator==(const Discard&, const Discard&) = default;
};
struct Noop {
  friend bool operator==(const Noop&, const Noop&) = default;
};
}  // namespace action

using PadAction = std::variant<action::EnterPreview, action::Cycle, action::Accept,
                               action::Discard, action::Noop>;

enum class StreamFault : std::uint8_t { NonMonotonicTime, RepeatedDown };

struct StepResult {
  PadState state;
  PadAction action = action::Noop{};
  /// Set when the event was rejected; `state` is then the input state.
  std::optional<StreamFault> fault;
};

enum class ReleaseClass : std::uint8_t { Simultaneous, Sequential };

/// Simultaneous iff delta_ms <= window_ms.
ReleaseClass classify_release(Millis delta_ms, Millis window_ms);

StepResult step(const PadState& state, const KeyEvent& event, const PadConfig& config);

/// Time at which a pending release turns into a discard, if one is pending.
std::optional<Millis> next_deadline(const PadState& state, const PadConfig& config);

struct TimedAction {
  PadAction action;
  Millis t = 0;
  friend bool operator==(const TimedAction&, const TimedAction&) = default;
};

class ReplayError : public std::runtime_error {
 public:
  ReplayError(std::size_t index, StreamFault fault);
  std::size_t index() const noexcept { return index_; }
  StreamFault fault() const noexcept { return fault_; }

 private:
  std::size_t index_;
  StreamFault fault_;
};

/// Folds step() over the stream and keeps every non-Noop action.
/// Throws ReplayError carrying the zero-based index of the first rejected event.
std::vector<TimedAction> replay(const std::vector<KeyEvent>& events, const PadConfig& config);

bool is_noop(const PadAction& a);
std::string to_string(const PadAction& a);
std::string to_string(StreamFault f);
std::string to_string(const PadPhase& p);

}  // namespace padbench
