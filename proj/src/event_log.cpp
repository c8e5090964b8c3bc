#include "padbench/event_log.hpp"

#include <charconv>
#include <limits>

#include <fmt/format.h>

namespace padbench {

namespace {

template <class Int>
bool parse_decimal(std::string_view s, Int& out) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

KeyId parse_key(std::string_view s, std::size_t line) {
  if (s == "MOD_A") return KeyId::mod_a();
  if (s == "MOD_B") return KeyId::mod_b();
  if (s == "CYCLE") return KeyId::cycle();
  if (s == "TIMEOUT") return KeyId::timeout();
  constexpr std::string_view prefix = "OTHER:";
  if (s.substr(0, prefix.size()) == prefix) {
    int code = 0;
    if (parse_decimal(s.substr(prefix.size()), code)) return KeyId::other(code);
    throw EventLogError(line, fmt::format("bad key code in '{}'", s));
  }
  throw EventLogError(line, fmt::format("unknown key '{}'", s));
}

}  // namespace

EventLogError::EventLogError(std::size_t line, const std::string& what)
    : std::runtime_error(fmt::format("line {}: {}", line, what)), line_(line) {}

std::vector<KeyEvent> parse_event_log(std::string_view text) {
  std::vector<KeyEvent> events;
  if (text.empty()) return events;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    if (line_no == 1) {
      if (line != kEventLogHeader) {
        throw EventLogError(1, fmt::format("expected header '{}'", kEventLogHeader));
      }
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos) {
      throw EventLogError(line_no, "expected three fields t_ms,key,edge");
    }
    KeyEvent ev;
    if (!parse_decimal(line.substr(0, c1), ev.t)) {
      throw EventLogError(line_no,
                          fmt::format("bad timestamp '{}'", line.substr(0, c1)));
    }
    ev.key = parse_key(line.substr(c1 + 1, c2 - c1 - 1), line_no);
    const auto edge = line.substr(c2 + 1);
    if (edge == "down") {
      ev.edge = Edge::Down;
    } else if (edge == "up") {
      ev.edge = Edge::Up;
    } else {
      throw EventLogError(line_no, fmt::format("bad edge '{}'", edge));
    }
    events.push_back(ev);
  }
  return events;
}

std::string key_name(const KeyId& key) {
  switch (key.role) {
    case KeyRole::ModA:
      return "MOD_A";
    case KeyRole::ModB:
      return "MOD_B";
    case KeyRole::Cycle:
      return "CYCLE";
    case KeyRole::Timeout:
      return "TIMEOUT";
    case KeyRole::Other:
      return fmt::format("OTHER:{}", key.code);
  }
  return "?";
}

std::string format_event_log(const std::vector<KeyEvent>& events) {
  std::string out(kEventLogHeader);
  out += '\n';
  for (const auto& e : events) {
    out += fmt::format("{},{},{}\n", e.t, key_name(e.key), e.edge == Edge::Down ? "down" : "up");
  }
  return out;
}

}  // namespace padbench
