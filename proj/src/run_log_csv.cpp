#include <algorithm>
#include <charconv>
#include <map>

#include <fmt/format.h>

#include "padbench/run_log.hpp"

namespace padbench {

std::string_view to_string(Device d) { return d == Device::Pad ? "pad" : "trackpad"; }

std::optional<Device> parse_device(std::string_view s) {
  if (s == "pad") return Device::Pad;
  if (s == "trackpad") return Device::Trackpad;
  return std::nullopt;
}

CsvError::CsvError(std::size_t line, const std::string& what)
    : std::runtime_error(line ? fmt::format("line {}: {}", line, what) : what), line_(line) {}

std::string format_float(double v) { return fmt::format("{:.6g}", v); }

namespace {

void check_header_value(std::string_view key, std::string_view v) {
  if (v.find_first_of(",=\n\r") != std::string_view::npos) {
    throw std::invalid_argument(fmt::format("header field {} cannot contain ',', '=' or newlines: '{}'", key, v));
  }
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(s.substr(pos, next == std::string_view::npos ? next : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::string column_list() {
  std::string out;
  for (std::size_t i = 0; i < kRunLogColumns.size(); ++i) {
    if (i) out += ',';
    out += kRunLogColumns[i];
  }
  return out;
}

RunHeader parse_header(std::string_view line) {
  const auto fields = split(line, ',');
  if (fields.empty() || fields[0] != "#padbench") {
    throw CsvError(1, "missing '#padbench' header");
  }
  if (fields.size() < 2 || fields[1] != fmt::format("v{}", kRunLogSchemaVersion)) {
    throw CsvError(1, fmt::format("unknown schema version '{}'",
                                  fields.size() < 2 ? std::string_view{} : fields[1]));
  }
  std::map<std::string_view, std::string_view> kv;
  for (std::size_t i = 2; i < fields.size(); ++i) {
    const auto eq = fields[i].find('=');
    if (eq == std::string_view::npos) {
      throw CsvError(1, fmt::format("malformed header field '{}'", fields[i]));
    }
    kv[fields[i].substr(0, eq)] = fields[i].substr(eq + 1);
  }
  const auto get = [&](std::string_view key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw CsvError(1, fmt::format("header is missing '{}'", key));
    return std::string(it->second);
  };

  RunHeader h;
  h.run_id = get("run_id");
  h.condition = get("condition");
  const auto device = get("device");
  const auto d = parse_device(device);
  if (!d) throw CsvError(1, fmt::format("unknown device '{}'", device));
  h.device = *d;
  h.profile = get("profile");
  const auto seed = get("seed");
  const auto [ptr, ec] = std::from_chars(seed.data(), seed.data() + seed.size(), h.seed);
  if (ec != std::errc() || ptr != seed.data() + seed.size()) {
    throw CsvError(1, fmt::format("bad seed '{}'", seed));
  }
  return h;
}

void check_columns(std::string_view line) {
  const auto cols = split(line, ',');
  for (const auto& expected : kRunLogColumns) {
    if (std::find(cols.begin(), cols.end(), expected) == cols.end()) {
      throw CsvError(2, fmt::format("missing column '{}'", expected));
    }
  }
  if (line != column_list()) {
    throw CsvError(2, fmt::format("columns must be exactly '{}'", column_list()));
  }
}

template <class T>
T parse_cell(std::string_view cell, std::size_t line, std::string_view column) {
  T v{};
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw CsvError(line, fmt::format("non-numeric value '{}' in column {}", cell, column));
  }
  return v;
}

TrialRecord parse_row(std::string_view line, std::size_t line_no) {
  const auto cells = split(line, ',');
  if (cells.size() != kRunLogColumns.size()) {
    throw CsvError(line_no, fmt::format("expected {} cells, found {}", kRunLogColumns.size(),
                                        cells.size()));
  }
  const auto i = [&](std::size_t c) { return parse_cell<int>(cells[c], line_no, kRunLogColumns[c]); };
  const auto d = [&](std::size_t c) {
    return parse_cell<double>(cells[c], line_no, kRunLogColumns[c]);
  };
  TrialRecord r;
  r.trial_idx = i(0);
  r.id_bits = d(1);
  r.amplitude_px = d(2);
  r.width_px = d(3);
  r.mt_ms = d(4);
  const int err = i(5);
  if (err != 0 && err != 1) throw CsvError(line_no, fmt::format("error must be 0 or 1, got {}", err));
  r.error = err == 1;
  r.strokes = i(6);
  r.keypresses = i(7);
  r.clicks = i(8);
  r.previews = i(9);
  r.cycles = i(10);
  r.discards = i(11);
  r.pointer_travel_px = d(12);
  r.saved_px = d(13);
  return r;
}

}  // namespace

std::string export_csv(const RunLog& log) {
  const auto& h = log.header;
  check_header_value("run_id", h.run_id);
  check_header_value("condition", h.condition);
  check_header_value("profile", h.profile);

  std::string out = fmt::format("#padbench,v{},run_id={},condition={},device={},profile={},seed={}\n",
                                h.schema_version, h.run_id, h.condition, to_string(h.device),
                                h.profile, h.seed);
  out += column_list();
  out += '\n';
  for (const auto& r : log.records) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.trial_idx,
                       format_float(r.id_bits), format_float(r.amplitude_px),
                       format_float(r.width_px), format_float(r.mt_ms), r.error ? 1 : 0, r.strokes,
                       r.keypresses, r.clicks, r.previews, r.cycles, r.discards,
                       format_float(r.pointer_travel_px), format_float(r.saved_px));
  }
  return out;
}

RunLog parse_csv(std::string_view text) {
  std::vector<std::string_view> lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw CsvError(1, "empty file");

  RunLog log;
  log.header = parse_header(lines[0]);
  if (lines.size() < 2) throw CsvError(2, "missing column header");
  check_columns(lines[1]);

  for (std::size_t k = 2; k < lines.size(); ++k) {
    const std::size_t line_no = k + 1;
    auto rec = parse_row(lines[k], line_no);
    if (rec.trial_idx < 1 ||
        (!log.records.empty() && rec.trial_idx <= log.records.back().trial_idx)) {
      throw CsvError(line_no, fmt::format("trial_idx {} is not strictly increasing from 1",
                                          rec.trial_idx));
    }
    log.records.push_back(rec);
  }
  return log;
}

}  // namespace padbench
