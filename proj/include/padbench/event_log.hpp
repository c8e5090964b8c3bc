#pragma once

// Text format for recorded key streams:
//
//   t_ms,key,edge
//   0,MOD_A,down
//   50,MOD_B,down
//   1600,OTHER:65,up
//
// Keys are MOD_A, MOD_B, CYCLE, TIMEOUT and OTHER:<decimal code>; edges are
// `down` or `up`. Lines end in '\n'; the final newline is optional.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "padbench/pad_core.hpp"

namespace padbench {

inline constexpr std::string_view kEventLogHeader = "t_ms,key,edge";

class EventLogError : public std::runtime_error {
 public:
  EventLogError(std::size_t line, const std::string& what);
  /// One-based line number in the source text.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Parses an event log. An empty document or a header-only document yields an
/// empty stream. Stream validity (monotonic time, edge alternation) is left to
/// replay(); only syntax is checked here.
std::vector<KeyEvent> parse_event_log(std::string_view text);

std::string format_event_log(const std::vector<KeyEvent>& events);

std::string key_name(const KeyId& key);

/// Line number of event `index` in a document produced by format_event_log.
constexpr std::size_t event_line(std::size_t index) { return index + 2; }

}  // namespace padbench
