#pragma once

// RunLog: one run of ISO 9241-9 trials, and its CSV serialization (schema v1).
//
//   #padbench,v1,run_id=<id>,condition=<name>,device=<trackpad|pad>,profile=<name|none>,seed=<u64>
//   trial_idx,id_bits,amplitude_px,width_px,mt_ms,error,strokes,keypresses,clicks,previews,cycles,discards,pointer_travel_px,saved_px
//
// Floats are written with at most six significant digits, booleans as 0/1,
// lines end in '\n'. A file produced by export_csv re-exports byte-identically
// after parse_csv.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace padbench {

enum class Device : std::uint8_t { Trackpad, Pad };

std::string_view to_string(Device d);
std::optional<Device> parse_device(std::string_view s);

struct TrialRecord {
  int trial_idx = 1;
  double id_bits = 0.0;
  double amplitude_px = 0.0;
  double width_px = 0.0;
  double mt_ms = 0.0;
  bool error = false;
  int strokes = 1;
  int keypresses = 0;
  int clicks = 0;
  int previews = 0;
  int cycles = 0;
  int discards = 0;
  double pointer_travel_px = 0.0;
  double saved_px = 0.0;

  /// Chord engagements that ended in an accept (each preview ends in exactly
  /// one accept or discard).
  int accepts() const { return previews > discards ? previews - discards : 0; }
  double throughput_bps() const { return id_bits / (mt_ms / 1000.0); }

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

inline constexpr int kRunLogSchemaVersion = 1;

inline constexpr std::array<std::string_view, 14> kRunLogColumns = {
    "trial_idx", "id_bits", "amplitude_px", "width_px", "mt_ms",
    "error", "strokes", "keypresses", "clicks", "previews",
    "cycles", "discards", "pointer_travel_px", "saved_px"};

struct RunHeader {
  std::string run_id;
  std::string condition;
  Device device = Device::Trackpad;
  std::string profile = "none";
  std::uint64_t seed = 0;
  int schema_version = kRunLogSchemaVersion;

  friend bool operator==(const RunHeader&, const RunHeader&) = default;
};

struct RunLog {
  RunHeader header;
  std::vector<TrialRecord> records;
  /// Warm-up trials already removed by exclude_warmup; nullopt while the log
  /// still carries its warm-up. Not serialized.
  std::optional<int> warmup_excluded;
  std::vector<std::string> warnings;
};

class CsvError : public std::runtime_error {
 public:
  CsvError(std::size_t line, const std::string& what);
  /// One-based line number; 0 when the error is not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Throws std::invalid_argument if a header field contains ',', '=' or a
/// newline, since it could not be parsed back.
std::string export_csv(const RunLog& log);
RunLog parse_csv(std::string_view text);

/// Canonical float formatting used by the CSV writer.
std::string format_float(double v);

}  // namespace padbench
