#include "padbench/params.hpp"

#include <fmt/format.h>

#include "json.hpp"

namespace padbench {

using nlohmann::ordered_json;

namespace {


double* field_ptr(SimParams& p, std::string_view name) {
  auto& m = p.motor;
  auto& d = p.decision;
  if (name == "motor.fitts_a") return &m.fitts_a;
  if (name == "motor.fitts_b") return &m.fitts_b;
  if (name == "motor.mt_noise_cv") return &m.mt_noise_cv;
  if (name == "motor.miss_rate") return &m.miss_rate;
  if (name == "motor.correction_penalty_ms") return &m.correction_penalty_ms;
  if (name == "motor.extra_segment_prob") return &m.extra_segment_prob;
  if (name == "motor.fitts_b_pad") return &m.fitts_b_pad;
  if (name == "decision.react_ms") return &d.react_ms;
  if (name == "decision.hick_ms_per_bit") return &d.hick_ms_per_bit;
  if (name == "decision.verify_ms_per_option") return &d.verify_ms_per_option;
  if (name == "decision.cycle_press_ms") return &d.cycle_press_ms;
  if (name == "decision.release_gap_mu_ms") return &d.release_gap_mu_ms;
  if (name == "decision.release_gap_sigma_ms") return &d.release_gap_sigma_ms;
  if (name == "decision.overshoot_prob") return &d.overshoot_prob;
  return nullptr;
}

}  // namespace

const std::vector<std::string>& param_names() {
  static const std::vector<std::string> names = {
      "motor.fitts_a",          "motor.fitts_b",
      "motor.mt_noise_cv",      "motor.miss_rate",
      "motor.correction_penalty_ms", "motor.extra_segment_prob",
      "motor.fitts_b_pad",      "decision.react_ms",
      "decision.hick_ms_per_bit", "decision.verify_ms_per_option",
      "decision.cycle_press_ms", "decision.release_gap_mu_ms",
      "decision.release_gap_sigma_ms", "decision.overshoot_prob"};
  return names;
}

double get_param(const SimParams& params, std::string_view name) {
  auto copy = params;
  const double* p = field_ptr(copy, name);
  if (!p) throw ParamsError(fmt::format("unknown parameter '{}'", name));
  return *p;
}

void set_param(SimParams& params, std::string_view name, double value) {
  double* p = field_ptr(params, name);
  if (!p) throw ParamsError(fmt::format("unknown parameter '{}'", name));
  *p = value;
}

SimParams parse_params(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw ParamsError(fmt::format("params file is not valid JSON: {}", e.what()));
  }
  if (!doc.is_object()) throw ParamsError("params file must be a JSON object");
  if (!doc.contains("version") || doc["version"] != 1) {
    throw ParamsError("params file: unsupported or missing version (expected 1)");
  }

  SimParams out;
  std::size_t seen = 0;
  for (const auto& [group, body] : doc.items()) {
    if (group == "version") continue;
    if (group != "motor" && group != "decision") {
      throw ParamsError(fmt::format("params file: unknown section '{}'", group));
    }
    if (!body.is_object()) throw ParamsError(fmt::format("params file: '{}' must be an object", group));
    for (const auto& [key, value] : body.items()) {
      const auto name = group + "." + key;
      double* p = field_ptr(out, name);
      if (!p) throw ParamsError(fmt::format("params file: unknown parameter '{}'", name));
      if (!value.is_number()) throw ParamsError(fmt::format("params file: '{}' must be a number", name));
      *p = value.get<double>();
      ++seen;
    }
  }
  if (seen != param_names().size()) {
    for (const auto& name : param_names()) {
      const auto dot = name.find('.');
      const auto group = name.substr(0, dot);
      if (!doc.contains(group) || !doc[group].contains(name.substr(dot + 1))) {
        throw ParamsError(fmt::format("params file: missing parameter '{}'", name));
      }
    }
  }
  try {
    out.motor.validate();
    out.decision.validate();
  } catch (const std::invalid_argument& e) {
    throw ParamsError(fmt::format("params file: {}", e.what()));
  }
  return out;
}

std::string format_params(const SimParams& params) {
  ordered_json doc;
  doc["version"] = 1;
  for (const auto& name : param_names()) {
    const auto dot = name.find('.');
    doc[name.substr(0, dot)][name.substr(dot + 1)] = get_param(params, name);
  }
  return doc.dump(2) + "\n";
}

// Frozen output of the calibration run stored in data/calibration/default_params.json.
SimParams default_params() {
  SimParams p;
  p.motor.fitts_a = 31.10489260900757;
  p.motor.fitts_b = 242.67572649653428;
  p.motor.mt_noise_cv = 0.25;
  p.motor.miss_rate = 0.09691132494777256;
  p.motor.correction_penalty_ms = 400.0;
  p.motor.extra_segment_prob = 0.3632845194649814;
  p.motor.fitts_b_pad = 30.0;
  p.decision.react_ms = 744.2983645670188;
  p.decision.hick_ms_per_bit = 89.06002354137651;
  p.decision.verify_ms_per_option = 287.2355445470528;
  p.decision.cycle_press_ms = 531.3059030015359;
  p.decision.release_gap_mu_ms = 60.0;
  p.decision.release_gap_sigma_ms = 40.0;
  p.decision.overshoot_prob = 0.43168361413483336;
  return p;
}

}  // namespace padbench
