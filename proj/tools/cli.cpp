#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "padbench/calibrate.hpp"
#include "padbench/event_log.hpp"
#include "padbench/metrics.hpp"
#include "padbench/pad_core.hpp"
#include "padbench/params.hpp"
#include "padbench/prediction.hpp"
#include "padbench/run_log.hpp"
#include "padbench/usersim.hpp"

namespace padbench::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot read '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write to a sibling temp file and rename, so readers never see a partial file.
void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
    if (!o) throw DataError(fmt::format("cannot write '{}'", tmp.string()));
    o << content;
    if (!o) throw DataError(fmt::format("failed writing '{}'", tmp.string()));
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw DataError(fmt::format("cannot move '{}' into place: {}", path.string(), ec.message()));
}

SimParams resolve_params(const std::string& params_file) {
  std::string path = params_file;
  if (path.empty()) {
    if (const char* env = std::getenv("PADBENCH_PARAMS"); env && *env) path = env;
  }
  if (path.empty()) return default_params();
  try {
    return parse_params(read_file(path));
  } catch (const ParamsError& e) {
    throw DataError(fmt::format("invalid params file '{}': {}", path, e.what()));
  }
}

AccuracyProfile resolve_profile(const std::string& name) {
  if (auto p = AccuracyProfile::preset(name)) return *p;
  if (fs::is_regular_file(name)) {
    try {
      const auto doc = ordered_json::parse(read_file(name));
      return AccuracyProfile(doc.at("name").get<std::string>(), doc.at("p").get<std::vector<double>>());
    } catch (const std::exception& e) {
      throw DataError(fmt::format("invalid profile file '{}': {}", name, e.what()));
    }
  }
  std::string known;
  for (const auto& n : AccuracyProfile::preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw UsageError(
      fmt::format("unknown profile '{}' (known profiles: {}, or a JSON profile file)", name, known));
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string device;
  std::string profile;
  std::vector<double> ids = {4.0, 5.0, 6.0};
  int trials = 22;
  int runs = 1;
  std::optional<std::uint64_t> seed;
  std::string params_file;
  std::string out_dir = ".";
  std::int64_t window = 170;
  bool learning = false;
  double width = 50.0;
  int n_targets = 9;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  if (!a.seed) throw UsageError("simulate requires --seed");
  const auto device = parse_device(a.device);
  if (!device) throw UsageError(fmt::format("unknown device '{}' (use pad or trackpad)", a.device));
  if (*device == Device::Trackpad && !a.profile.empty()) {
    throw UsageError("--profile cannot be combined with --device trackpad");
  }
  if (*device == Device::Pad && a.profile.empty()) throw UsageError("--device pad requires --profile");
  if (a.trials < 1 || a.runs < 1) throw UsageError("--trials and --runs must be at least 1");
  for (double id : a.ids) {
    if (!(id > 0.0)) throw UsageError(fmt::format("IDs must be positive, got {}", id));
  }

  const SimParams params = resolve_params(a.params_file);
  std::optional<AccuracyProfile> profile;
  if (*device == Device::Pad) profile = resolve_profile(a.profile);

  std::error_code ec;
  fs::create_directories(a.out_dir, ec);
  if (ec || !fs::is_directory(a.out_dir)) {
    throw DataError(fmt::format("cannot create output directory '{}'", a.out_dir));
  }

  RunOptions opts;
  opts.learning_curve = a.learning;
  opts.width_px = a.width;
  opts.n_targets = a.n_targets;

  ordered_json manifest;
  manifest["command"] = "simulate";
  manifest["device"] = a.device;
  manifest["profile"] = profile ? ordered_json(profile->name()) : ordered_json("none");
  if (profile) manifest["profile_p"] = profile->p();
  manifest["ids"] = a.ids;
  manifest["trials"] = a.trials;
  manifest["runs"] = a.runs;
  manifest["seed"] = *a.seed;
  manifest["release_window_ms"] = a.window;
  manifest["learning_curve"] = a.learning;
  manifest["width_px"] = a.width;
  manifest["n_targets"] = a.n_targets;
  manifest["params"] = ordered_json::parse(format_params(params));
  manifest["files"] = ordered_json::array();

  for (std::size_t i = 0; i < a.ids.size(); ++i) {
    const SimCondition cond = *device == Device::Pad
                                  ? SimCondition::pad(*profile, a.ids[i], a.window)
                                  : SimCondition::trackpad(a.ids[i]);
    for (int run = 1; run <= a.runs; ++run) {
      // Distinct stream per (ID, run) so IDs never share trial draws.
      const int run_key = static_cast<int>(i) * a.runs + run;
      RunLog log;
      try {
        log = simulate_run(cond, a.trials, params, *a.seed, run_key, opts);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      log.header.run_id = fmt::format("{}_{}_{}", cond.name(), a.ids[i], run);
      const auto name = fmt::format("{}_{}_{}.csv", cond.name(), a.ids[i], run);
      write_file_atomic(fs::path(a.out_dir) / name, export_csv(log));
      manifest["files"].push_back(name);
    }
  }
  write_file_atomic(fs::path(a.out_dir) / "manifest.json", manifest.dump(2) + "\n");
  out << fmt::format("wrote {} run logs to {}\n", manifest["files"].size(), a.out_dir);
  return kOk;
}

// ---------------------------------------------------------------- shared log loading

struct LoadedLogs {
  std::map<std::string, std::vector<RunLog>> by_condition;  // warm-up intact
  std::vector<std::pair<std::string, std::string>> rejected;
};

LoadedLogs load_logs(const std::vector<std::string>& files, std::ostream& err) {
  if (files.empty()) throw UsageError("no input files given");
  LoadedLogs out;
  for (const auto& f : files) {
    try {
      auto log = parse_csv(read_file(f));
      out.by_condition[log.header.condition].push_back(std::move(log));
    } catch (const std::exception& e) {
      err << fmt::format("{}: {}\n", f, e.what());
      out.rejected.emplace_back(f, e.what());
    }
  }
  if (out.by_condition.empty()) throw DataError("no valid input files");
  return out;
}

std::map<std::string, std::vector<RunLog>> without_warmup(
    const std::map<std::string, std::vector<RunLog>>& logs, int k) {
  std::map<std::string, std::vector<RunLog>> out;
  for (const auto& [cond, list] : logs) {
    for (const auto& log : list) out[cond].push_back(exclude_warmup(log, k));
  }
  return out;
}

std::vector<TrialRecord> pooled(const std::vector<RunLog>& logs) {
  std::vector<TrialRecord> out;
  for (const auto& l : logs) out.insert(out.end(), l.records.begin(), l.records.end());
  return out;
}

std::map<double, std::vector<TrialRecord>> by_id(const std::vector<TrialRecord>& records) {
  std::map<double, std::vector<TrialRecord>> out;
  for (const auto& r : records) out[std::round(r.id_bits * 1e6) / 1e6].push_back(r);
  return out;
}

ordered_json interval_json(const Interval& i) { return ordered_json::array({i.lo, i.hi}); }

// ---------------------------------------------------------------- analyze

int cmd_analyze(const std::vector<std::string>& files, int k, const std::string& format,
                std::ostream& out, std::ostream& err) {
  if (k < 0) throw UsageError("--exclude-warmup must be non-negative");
  if (format != "text" && format != "json") throw UsageError("--format must be text or json");
  const auto loaded = load_logs(files, err);
  const auto trimmed = without_warmup(loaded.by_condition, k);
  const SummaryTable table = summary_table(trimmed);

  ordered_json report;
  report["exclude_warmup"] = k;
  report["includes_warmup"] = table.includes_warmup;
  report["conditions"] = ordered_json::array();
  std::string details;
  for (const auto& [cond, logs] : trimmed) {
    const auto recs = pooled(logs);
    ordered_json c;
    c["condition"] = cond;
    c["n_trials"] = recs.size();
    c["mean_mt_ms"] = nullptr;
    if (!recs.empty()) {
      double sum = 0.0;
      for (const auto& r : recs) sum += r.mt_ms;
      c["mean_mt_ms"] = sum / static_cast<double>(recs.size());
      const auto tp = throughput(recs);
      c["tp"] = {{"mean", tp.mean_bps}, {"median", tp.median_bps}, {"sd", tp.sd_bps},
                 {"ci95", interval_json(tp.ci95)}};
      const auto st = stroke_stats(recs);
      c["strokes"] = {{"mean", st.mean}, {"min", st.min}, {"max", st.max}};
      const auto er = error_rate(recs);
      c["error_rate"] = {{"rate", er.rate}, {"errors", er.successes}, {"n", er.n},
                         {"ci95", interval_json(er.ci95)}};
      details += fmt::format("{}: n={} mean_mt={:.1f}ms TP={:.2f}bps strokes={:.2f} errors={:.3f} [{:.3f},{:.3f}]\n",
                             cond, recs.size(), sum / static_cast<double>(recs.size()), tp.mean_bps,
                             st.mean, er.rate, er.ci95.lo, er.ci95.hi);
    }
    const auto mo = motion_accounting(recs);
    c["motion"] = {{"total_travel_px", mo.total_travel_px},
                   {"total_saved_px", mo.total_saved_px},
                   {"accepts", mo.accepts},
                   {"saved_per_accept_px", mo.saved_per_accept_px ? ordered_json(*mo.saved_per_accept_px)
                                                                  : ordered_json(nullptr)}};
    try {
      const auto fit = fit_linear(mt_vs_id(recs));
      c["fit"] = {{"slope", fit.slope},
                  {"intercept", fit.intercept},
                  {"r2", fit.r2},
                  {"slope_ci95", interval_json(fit.slope_ci95)},
                  {"intercept_ci95", interval_json(fit.intercept_ci95)},
                  {"n", fit.n}};
      details += fmt::format("  fit: mt = {:.1f} + {:.1f}*ID ms (slope 95% CI [{:.1f},{:.1f}], r2={:.3f})\n",
                             fit.intercept, fit.slope, fit.slope_ci95.lo, fit.slope_ci95.hi, fit.r2);
    } catch (const MetricsError& e) {
      c["fit"] = nullptr;
      details += fmt::format("  fit: unavailable ({})\n", e.what());
    }
    details += fmt::format("  motion: travel={:.0f}px saved={:.0f}px accepts={}\n", mo.total_travel_px,
                           mo.total_saved_px, mo.accepts);
    c["learning_curve"] = learning_curve(loaded.by_condition.at(cond));
    report["conditions"].push_back(std::move(c));
  }
  ordered_json rows = ordered_json::array();
  const auto cells = table.cells();
  for (std::size_t r = 0; r < cells.size(); ++r) {
    rows.push_back({{"label", SummaryTable::row_labels()[r]}, {"cells", cells[r]}});
  }
  ordered_json cols = ordered_json::array();
  for (const auto& c : table.columns) cols.push_back(c.condition);
  report["table"] = {{"columns", cols}, {"rows", rows}};
  ordered_json rej = ordered_json::array();
  for (const auto& [f, e] : loaded.rejected) rej.push_back({{"file", f}, {"error", e}});
  report["rejected"] = rej;

  if (format == "json") {
    out << report.dump(2) << "\n";
  } else {
    out << table.to_text() << "\n" << details;
  }
  return loaded.rejected.empty() ? kOk : kDataError;
}

// ---------------------------------------------------------------- replay

int cmd_replay(const std::string& file, const PadConfig& cfg, std::ostream& out) {
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const std::string text = read_file(file);
  std::vector<KeyEvent> events;
  try {
    events = parse_event_log(text);
  } catch (const EventLogError& e) {
    throw DataError(fmt::format("{}: {}", file, e.what()));
  }
  try {
    for (const auto& ta : replay(events, cfg)) out << to_string(ta.action) << '@' << ta.t << '\n';
  } catch (const ReplayError& e) {
    throw DataError(fmt::format("{}: line {}: {}", file, event_line(e.index()), to_string(e.fault())));
  }
  return kOk;
}

// ---------------------------------------------------------------- calibrate

int cmd_calibrate(const std::string& targets_file, const std::string& search_file,
                  std::optional<std::uint64_t> seed, const std::string& out_file,
                  const std::string& params_file, std::ostream& out) {
  if (!seed) throw UsageError("calibrate requires --seed");
  CalibrationTargets targets;
  SearchSpace space;
  try {
    targets = parse_targets(read_file(targets_file));
    space = parse_search_space(read_file(search_file), resolve_params(params_file));
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  CalibrationResult res;
  try {
    res = calibrate(targets, space, *seed);
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  if (!out_file.empty()) write_file_atomic(out_file, format_params(res.params));

  out << fmt::format("evaluations: {}\nobjective: {:.6g}\n", res.evaluations, res.objective);
  out << fmt::format("{:<24} {:>10} {:>10} {:>9}\n", "target", "reported", "simulated", "residual");
  double worst = 0.0;
  for (const auto& r : res.residuals) {
    out << fmt::format("{:<24} {:>10.4f} {:>10.4f} {:>8.1f}{}\n", r.label, r.target, r.simulated,
                       r.relative ? 100.0 * r.value : 100.0 * r.value, r.relative ? "%" : "pp");
    if (r.relative) worst = std::max(worst, r.value);
  }
  out << fmt::format("worst relative residual: {:.1f}%\n", 100.0 * worst);
  if (out_file.empty()) out << "\n" << format_params(res.params);
  return kOk;
}

// ---------------------------------------------------------------- scenario-validate

int cmd_scenario_validate(const std::string& file, std::ostream& out) {
  try {
    const auto sc = load_scenario(read_file(file));
    out << fmt::format("ok: {} screens, start '{}'\n", sc.screens.size(), sc.start);
  } catch (const ScenarioError& e) {
    throw DataError(fmt::format("{}: {}", file, e.what()));
  }
  return kOk;
}

// ---------------------------------------------------------------- plotdata

int cmd_plotdata(const std::vector<std::string>& files, const std::string& figure, int k,
                 std::ostream& out, std::ostream& err) {
  static const std::set<std::string> figures = {"f6", "f7", "f8", "f9", "f10"};
  if (!figures.count(figure)) throw UsageError("--figure must be one of f6, f7, f8, f9, f10");
  const auto loaded = load_logs(files, err);
  const auto trimmed = without_warmup(loaded.by_condition, k);

  if (figure == "f6") {
    out << "condition,ordinal,normalized_mt\n";
    for (const auto& [cond, logs] : loaded.by_condition) {
      const auto curve = learning_curve(logs);
      for (std::size_t j = 0; j < curve.size(); ++j) {
        if (!std::isnan(curve[j])) out << fmt::format("{},{},{}\n", cond, j + 1, format_float(curve[j]));
      }
    }
  } else if (figure == "f7") {
    out << "condition,series,id_bits,mt_ms\n";
    for (const auto& [cond, logs] : trimmed) {
      const auto recs = pooled(logs);
      for (const auto& r : recs) {
        out << fmt::format("{},point,{},{}\n", cond, format_float(r.id_bits), format_float(r.mt_ms));
      }
      try {
        const auto fit = fit_linear(mt_vs_id(recs));
        for (const auto& [id, _] : by_id(recs)) {
          out << fmt::format("{},fit,{},{}\n", cond, format_float(id),
                             format_float(fit.intercept + fit.slope * id));
        }
      } catch (const MetricsError& e) {
        err << fmt::format("{}: no fit: {}\n", cond, e.what());
      }
    }
  } else {
    out << (figure == "f8"   ? "condition,id_bits,mean_tp_bps,ci_lo,ci_hi\n"
            : figure == "f9" ? "condition,id_bits,mean_strokes,ci_lo,ci_hi\n"
                             : "condition,id_bits,error_rate,ci_lo,ci_hi\n");
    for (const auto& [cond, logs] : trimmed) {
      for (const auto& [id, recs] : by_id(pooled(logs))) {
        double v = 0.0, lo = 0.0, hi = 0.0;
        if (figure == "f8") {
          const auto tp = throughput(recs);
          v = tp.mean_bps, lo = tp.ci95.lo, hi = tp.ci95.hi;
        } else if (figure == "f9") {
          double sum = 0.0, ss = 0.0;
          for (const auto& r : recs) sum += r.strokes;
          v = sum / static_cast<double>(recs.size());
          for (const auto& r : recs) ss += (r.strokes - v) * (r.strokes - v);
          const double sd = recs.size() > 1 ? std::sqrt(ss / static_cast<double>(recs.size() - 1)) : 0.0;
          const double half = 1.96 * sd / std::sqrt(static_cast<double>(recs.size()));
          lo = v - half, hi = v + half;
        } else {
          const auto er = error_rate(recs);
          v = er.rate, lo = er.ci95.lo, hi = er.ci95.hi;
        }
        out << fmt::format("{},{},{},{},{}\n", cond, format_float(id), format_float(v),
                           format_float(lo), format_float(hi));
      }
    }
  }
  return loaded.rejected.empty() ? kOk : kDataError;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"padbench: Preview-Accept-Discard engine and ISO 9241-9 evaluation tools"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  SimulateArgs sim;
  std::uint64_t sim_seed = 0;
  auto* simulate = app.add_subcommand("simulate", "Simulate ISO 9241-9 runs and write RunLog CSVs");
  simulate->add_option("--device", sim.device, "pad or trackpad")->required();
  simulate->add_option("--profile", sim.profile, "ideal, uniform3, or a JSON profile file (pad only)");
  simulate->add_option("--ids", sim.ids, "Comma-separated indices of difficulty")->delimiter(',');
  simulate->add_option("--trials", sim.trials, "Trials per run")->capture_default_str();
  simulate->add_option("--runs", sim.runs, "Runs per ID")->capture_default_str();
  auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "Base seed (required)");
  simulate->add_option("--params", sim.params_file, "Parameter file (default: $PADBENCH_PARAMS or built-in)");
  simulate->add_option("--out-dir", sim.out_dir, "Output directory")->capture_default_str();
  simulate->add_option("--window", sim.window, "Release window in ms")->capture_default_str();
  simulate->add_flag("--learning-curve", sim.learning, "Slow down trials 1-5 (warm-up effect)");
  simulate->add_option("--width", sim.width, "Target width in px")->capture_default_str();
  simulate->add_option("--targets", sim.n_targets, "Targets on the ring (odd)")->capture_default_str();

  std::vector<std::string> inputs;
  int warmup = 5;
  std::string format = "text";
  auto* analyze = app.add_subcommand("analyze", "Summarize RunLog CSVs");
  analyze->add_option("inputs", inputs, "RunLog CSV files");
  analyze->add_option("--exclude-warmup", warmup, "Leading trials to drop per run")->capture_default_str();
  analyze->add_option("--format", format, "text or json")->capture_default_str();

  std::string event_file;
  PadConfig pad_cfg;
  bool no_timeout_discard = false;
  auto* replay_cmd = app.add_subcommand("replay", "Replay a key event log through the PAD engine");
  replay_cmd->add_option("events", event_file, "Event log file")->required();
  replay_cmd->add_option("--window", pad_cfg.release_window_ms, "Release window in ms")->capture_default_str();
  replay_cmd->add_option("--max-candidates", pad_cfg.max_candidates, "Candidates to cycle through")
      ->capture_default_str();
  replay_cmd->add_flag("--no-timeout-discard", no_timeout_discard, "Ignore TIMEOUT events");

  std::string targets_file, search_file, calib_out, calib_params;
  std::uint64_t calib_seed = 0;
  auto* calibrate_cmd = app.add_subcommand("calibrate", "Fit simulator parameters to target aggregates");
  calibrate_cmd->add_option("--targets", targets_file, "Targets file")->required();
  calibrate_cmd->add_option("--search", search_file, "Search space file")->required();
  auto* calib_seed_opt = calibrate_cmd->add_option("--seed", calib_seed, "Search seed (required)");
  calibrate_cmd->add_option("--out", calib_out, "Write the fitted parameter file here");
  calibrate_cmd->add_option("--params", calib_params, "Base parameters for fixed fields");

  std::string scenario_file;
  auto* validate = app.add_subcommand("scenario-validate", "Validate a scenario document");
  validate->add_option("file", scenario_file, "Scenario file")->required();

  std::vector<std::string> plot_inputs;
  std::string figure;
  int plot_warmup = 5;
  auto* plot = app.add_subcommand("plotdata", "Emit plot-ready CSV series");
  plot->add_option("inputs", plot_inputs, "RunLog CSV files");
  plot->add_option("--figure", figure, "f6, f7, f8, f9 or f10")->required();
  plot->add_option("--exclude-warmup", plot_warmup, "Leading trials to drop per run")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (simulate->parsed()) {
      if (sim_seed_opt->count()) sim.seed = sim_seed;
      return cmd_simulate(sim, out);
    }
    if (analyze->parsed()) return cmd_analyze(inputs, warmup, format, out, err);
    if (replay_cmd->parsed()) {
      pad_cfg.emit_discard_on_timeout = !no_timeout_discard;
      return cmd_replay(event_file, pad_cfg, out);
    }
    if (calibrate_cmd->parsed()) {
      std::optional<std::uint64_t> seed;
      if (calib_seed_opt->count()) seed = calib_seed;
      return cmd_calibrate(targets_file, search_file, seed, calib_out, calib_params, out);
    }
    if (validate->parsed()) return cmd_scenario_validate(scenario_file, out);
    if (plot->parsed()) return cmd_plotdata(plot_inputs, figure, plot_warmup, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"padbench"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace padbench::cli
