// One PASS/FAIL line per acceptance criterion. Tolerances are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <fmt/format.h>

#include "json.hpp"
#include "padbench/event_log.hpp"
#include "padbench/metrics.hpp"
#include "padbench/pad_core.hpp"
#include "padbench/prediction.hpp"
#include "padbench/rng.hpp"
#include "padbench/run_log.hpp"
#include "padbench/session.hpp"
#include "padbench/taskgen.hpp"
#include "padbench/usersim.hpp"
#include "test_support.hpp"
#include "transition_table.hpp"

using namespace padbench;

namespace {

constexpr double kGrammarBudgetS = 1.0;
constexpr int kMinGoldenTraces = 10;

constexpr int kDraws = 100000;
constexpr double kFreqTol = 0.005;
constexpr double kChiSquareMinP = 0.01;
constexpr double kDistributionBudgetS = 5.0;

constexpr double kIdTol = 1e-12;

constexpr int kRegressionDatasets = 100;
constexpr double kRegressionRelTol = 1e-9;

constexpr double kTpRelTol = 0.15;
constexpr double kStrokeRelTol = 0.20;
constexpr double kErrorAbsTol = 0.02;
constexpr int kReplications = 100;
constexpr int kMinOrderedReplications = 95;
constexpr double kTableBudgetS = 60.0;
constexpr int kTrialsPerRun = 22;
constexpr int kWarmup = 5;

constexpr int kMinSlopeReplications = 95;
constexpr double kMaxTpGap = 0.5;

constexpr int kLearningRuns = 1800;
constexpr double kLateLo = 0.95;
constexpr double kLateHi = 1.05;

constexpr double kMotionTol = 1e-9;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// ------------------------------------------------------------------ grammar

Outcome grammar() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  const auto traces = testsupport::golden_traces();
  int mismatched = 0;
  for (const auto& [events, expected] : traces) {
    std::string got;
    for (const auto& ta : replay(parse_event_log(testsupport::read_file(events)), PadConfig{})) {
      got += to_string(ta.action) + "@" + std::to_string(ta.t) + "\n";
    }
    if (got != testsupport::read_file(expected)) {
      ++mismatched;
      o.detail += " mismatch:" + events.filename().string();
    }
  }
  std::size_t probes = 0;
  const auto bad = testsupport::check_transition_table(probes);
  const double elapsed = seconds_since(t0);
  o.pass = static_cast<int>(traces.size()) >= kMinGoldenTraces && mismatched == 0 && bad.empty() &&
           probes > 0 && elapsed < kGrammarBudgetS;
  o.detail = fmt::format("{} traces, {} mismatched; {} table probes, {} mismatched; {:.3f}s < {}s{}",
                         traces.size(), mismatched, probes, bad.size(), elapsed, kGrammarBudgetS, o.detail);
  return o;
}

// ------------------------------------------------------------------ distribution

Outcome distribution() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  std::string detail;
  for (const auto& [profile, expected] :
       std::vector<std::pair<AccuracyProfile, std::vector<double>>>{
           {AccuracyProfile::ideal(), {0.95, 0.04, 0.01}},
           {AccuracyProfile::uniform3(), {1.0 / 3, 1.0 / 3, 1.0 / 3}}}) {
    Rng rng(20240917);
    std::vector<long> counts(expected.size() + 1, 0);  // last slot: miss
    for (int i = 0; i < kDraws; ++i) {
      const Rank r = draw_rank(profile, rng);
      if (r && *r >= 1 && *r <= static_cast<int>(expected.size())) {
        ++counts[static_cast<std::size_t>(*r - 1)];
      } else {
        ++counts.back();
      }
    }
    double worst = 0.0, chi2 = 0.0;
    for (std::size_t k = 0; k < expected.size(); ++k) {
      const double f = static_cast<double>(counts[k]) / kDraws;
      worst = std::max(worst, std::abs(f - expected[k]));
      const double e = expected[k] * kDraws;
      chi2 += (counts[k] - e) * (counts[k] - e) / e;
    }
    const bool no_miss = counts.back() == 0;
    const boost::math::chi_squared dist(static_cast<double>(expected.size() - 1));
    const double p = boost::math::cdf(boost::math::complement(dist, chi2));
    o.pass = o.pass && worst <= kFreqTol && p > kChiSquareMinP && no_miss;
    detail += fmt::format("{}: max|df|={:.4f} chi2={:.3f} p={:.3f} misses={}; ", profile.name(), worst, chi2,
                          p, counts.back());
  }
  const double elapsed = seconds_since(t0);
  o.pass = o.pass && elapsed < kDistributionBudgetS;
  o.detail = detail + fmt::format("{:.3f}s < {}s", elapsed, kDistributionBudgetS);
  return o;
}

// ------------------------------------------------------------------ ID math

Outcome id_math() {
  Outcome o;
  double worst = 0.0;
  for (const auto& [a, w, id] : std::vector<std::tuple<double, double, double>>{
           {750, 50, 4}, {1550, 50, 5}, {3150, 50, 6}}) {
    worst = std::max(worst, std::abs(index_of_difficulty(a, w) - id));
  }
  double worst_round = 0.0;
  for (double id = 1.5; id <= 8.0; id += 0.25) {
    for (double w : {20.0, 50.0, 64.0}) {
      const RingLayout ring = layout_for_id(id, w);
      worst_round = std::max(worst_round, std::abs(ring.id_bits() - id));
      const RingLayout again = make_ring(ring.n_targets, ring.amplitude, ring.width);
      worst_round = std::max(worst_round, std::abs(again.id_bits() - id));
      // A = W (2^ID - 1) computed independently
      worst_round = std::max(worst_round, rel(ring.amplitude, w * (std::exp2(id) - 1.0)));
    }
  }
  o.pass = worst <= kIdTol && worst_round <= kIdTol;
  o.detail = fmt::format("power-of-two cases max err {:.2e}; layout round-trip max err {:.2e} (tol {:.0e})",
                         worst, worst_round, kIdTol);
  return o;
}

// ------------------------------------------------------------------ regression

struct OracleFit {
  long double slope, intercept, r2;
};

// Normal equations [n Sx; Sx Sxx][b0 b1]' = [Sy Sxy]' solved by Cramer's rule.
OracleFit normal_equations(const std::vector<std::pair<double, double>>& pts) {
  long double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    n += 1;
    sx += x;
    sy += y;
    sxx += static_cast<long double>(x) * x;
    sxy += static_cast<long double>(x) * y;
  }
  const long double det = n * sxx - sx * sx;
  OracleFit f;
  f.intercept = (sy * sxx - sx * sxy) / det;
  f.slope = (n * sxy - sx * sy) / det;
  const long double ybar = sy / n;
  long double sse = 0, sst = 0;
  for (const auto& [x, y] : pts) {
    const long double e = y - (f.intercept + f.slope * x);
    sse += e * e;
    sst += (y - ybar) * (y - ybar);
  }
  f.r2 = 1.0L - sse / sst;
  return f;
}

Outcome regression() {
  Outcome o;
  Rng rng(99);
  double worst = 0.0;
  for (int d = 0; d < kRegressionDatasets; ++d) {
    const int n = 3 + static_cast<int>(rng.below(200));
    const double a = rng.normal(300, 200), b = rng.normal(150, 100), noise = 1.0 + 200.0 * rng.uniform();
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < n; ++i) {
      const double x = 1.0 + 7.0 * rng.uniform();
      pts.emplace_back(x, a + b * x + rng.normal(0, noise));
    }
    const auto fit = fit_linear(pts);
    const auto ref = normal_equations(pts);
    worst = std::max({worst, rel(fit.slope, static_cast<double>(ref.slope)),
                      rel(fit.intercept, static_cast<double>(ref.intercept)),
                      rel(fit.r2, static_cast<double>(ref.r2))});
  }
  std::vector<std::pair<double, double>> line;
  for (int i = 0; i < 12; ++i) line.emplace_back(i * 0.5 + 1.0, 80.0 + 125.0 * (i * 0.5 + 1.0));
  const double r2 = fit_linear(line).r2;
  o.pass = worst <= kRegressionRelTol && r2 == 1.0;
  o.detail = fmt::format("{} datasets, max rel err {:.2e} (tol {:.0e}); collinear r2 = {:.17g}",
                         kRegressionDatasets, worst, kRegressionRelTol, r2);
  return o;
}

// ------------------------------------------------------------------ table reproduction

struct Expected {
  std::string name;
  SimCondition condition;
  double tp, strokes, errors;
  int min_trials;
};

struct Replication {
  std::map<std::string, std::vector<RunLog>> raw;      // warm-up intact
  std::map<std::string, std::vector<TrialRecord>> kept;  // warm-up excluded
};

const std::vector<Expected>& conditions() {
  static const std::vector<Expected> expected = {
      {"pad-ideal", SimCondition::pad(AccuracyProfile::ideal(), 5.0), 4.8, 1.08, 0.0, 112},
      {"pad-uniform3", SimCondition::pad(AccuracyProfile::uniform3(), 5.0), 2.7, 2.8, 0.05, 192},
      {"trackpad", SimCondition::trackpad(5.0), 4.2, 1.67, 0.091, 310}};
  return expected;
}

// Whole blocks of the three IDs, so every ID carries the same weight.
int runs_needed(int min_trials) {
  const int per_block = 3 * (kTrialsPerRun - kWarmup);
  return 3 * ((min_trials + per_block - 1) / per_block);
}

Replication replicate(int rep, const SimParams& params) {
  static const double ids[] = {4.0, 5.0, 6.0};
  Replication out;
  for (std::size_t c = 0; c < conditions().size(); ++c) {
    const auto& want = conditions()[c];
    const std::uint64_t seed = 1000003ULL * static_cast<std::uint64_t>(rep + 1) + c;
    for (int run = 1; run <= runs_needed(want.min_trials); ++run) {
      SimCondition cond = want.condition;
      cond.id_bits = ids[(run - 1) % 3];
      RunLog log = simulate_run(cond, kTrialsPerRun, params, seed, run);
      const RunLog trimmed = exclude_warmup(log, kWarmup);
      auto& kept = out.kept[want.name];
      kept.insert(kept.end(), trimmed.records.begin(), trimmed.records.end());
      out.raw[want.name].push_back(std::move(log));
    }
  }
  return out;
}

struct TableRun {
  std::vector<Replication> reps;
  double elapsed = 0.0;
};

const TableRun& table_run() {
  static const TableRun run = [] {
    const auto t0 = std::chrono::steady_clock::now();
    TableRun r;
    const SimParams params = default_params();
    for (int rep = 0; rep < kReplications; ++rep) r.reps.push_back(replicate(rep, params));
    r.elapsed = seconds_since(t0);
    return r;
  }();
  return run;
}

Outcome table_reproduction() {
  const auto& tr = table_run();
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  std::string detail;
  // Means pool all replications; every replication alone already meets the trial minimum.
  for (const auto& want : conditions()) {
    std::vector<TrialRecord> all;
    std::size_t smallest = SIZE_MAX;
    for (const auto& rep : tr.reps) {
      const auto& k = rep.kept.at(want.name);
      smallest = std::min(smallest, k.size());
      all.insert(all.end(), k.begin(), k.end());
    }
    const double tp = throughput(all).mean_bps;
    const double st = stroke_stats(all).mean;
    const double er = error_rate(all).rate;
    const bool ok = rel(tp, want.tp) <= kTpRelTol && rel(st, want.strokes) <= kStrokeRelTol &&
                    std::abs(er - want.errors) <= kErrorAbsTol &&
                    static_cast<int>(smallest) >= want.min_trials;
    o.pass = o.pass && ok;
    detail += fmt::format("{}: n/rep={} TP={:.2f} ({:+.1f}%) strokes={:.2f} ({:+.1f}%) err={:.3f} ({:+.1f}pp); ",
                          want.name, smallest, tp, 100 * (tp - want.tp) / want.tp, st,
                          100 * (st - want.strokes) / want.strokes, er, 100 * (er - want.errors));
  }
  int ordered = 0;
  for (const auto& rep : tr.reps) {
    const double ideal = throughput(rep.kept.at("pad-ideal")).mean_bps;
    const double uni = throughput(rep.kept.at("pad-uniform3")).mean_bps;
    const double track = throughput(rep.kept.at("trackpad")).mean_bps;
    if (ideal > track && track > uni) ++ordered;
  }
  const double elapsed = tr.elapsed + seconds_since(t0);
  o.pass = o.pass && ordered >= kMinOrderedReplications && elapsed < kTableBudgetS;
  o.detail = detail + fmt::format("ordering held in {}/{} (need {}); {:.2f}s < {}s", ordered, kReplications,
                                  kMinOrderedReplications, elapsed, kTableBudgetS);
  return o;
}

Outcome slopes_and_gap() {
  const auto& tr = table_run();
  Outcome o;
  int ideal_ok = 0, uni_ok = 0;
  for (const auto& rep : tr.reps) {
    const double s_ideal = fit_linear(mt_vs_id(rep.kept.at("pad-ideal"))).slope;
    const double s_uni = fit_linear(mt_vs_id(rep.kept.at("pad-uniform3"))).slope;
    const double s_track = fit_linear(mt_vs_id(rep.kept.at("trackpad"))).slope;
    if (s_ideal < s_track) ++ideal_ok;
    if (s_uni < s_track) ++uni_ok;
  }
  std::vector<TrialRecord> ideal, track;
  for (const auto& rep : tr.reps) {
    ideal.insert(ideal.end(), rep.kept.at("pad-ideal").begin(), rep.kept.at("pad-ideal").end());
    track.insert(track.end(), rep.kept.at("trackpad").begin(), rep.kept.at("trackpad").end());
  }
  const double gap = throughput(ideal).mean_bps - throughput(track).mean_bps;
  o.pass = ideal_ok >= kMinSlopeReplications && uni_ok >= kMinSlopeReplications && gap < kMaxTpGap;
  o.detail = fmt::format("slope(ideal)<slope(trackpad) in {}/{}, slope(uniform3)<slope(trackpad) in {}/{} (need {}); "
                         "TP gap ideal-trackpad {:.3f} < {}",
                         ideal_ok, kReplications, uni_ok, kReplications, kMinSlopeReplications, gap, kMaxTpGap);
  return o;
}

// ------------------------------------------------------------------ warm-up

Outcome warmup() {
  Outcome o;
  const RunLog log = simulate_run(SimCondition::trackpad(5.0), kTrialsPerRun, default_params(), 5, 1);
  const RunLog trimmed = exclude_warmup(log, kWarmup);
  bool exact = trimmed.records.size() == log.records.size() - kWarmup;
  for (std::size_t i = 0; exact && i < trimmed.records.size(); ++i) {
    exact = trimmed.records[i] == log.records[i + kWarmup] && trimmed.records[i].trial_idx == static_cast<int>(i) + 6;
  }

  RunOptions opts;
  opts.learning_curve = true;
  static const double ids[] = {4.0, 5.0, 6.0};
  std::string detail;
  bool curves_ok = true;
  for (const auto& want : conditions()) {
    std::vector<RunLog> logs;
    for (int run = 1; run <= kLearningRuns; ++run) {
      SimCondition cond = want.condition;
      cond.id_bits = ids[(run - 1) % 3];
      logs.push_back(simulate_run(cond, kTrialsPerRun, default_params(), 777, run, opts));
    }
    const auto curve = learning_curve(logs);
    double early_min = INFINITY, late_lo = INFINITY, late_hi = -INFINITY;
    for (std::size_t j = 0; j < curve.size(); ++j) {
      if (static_cast<int>(j) < kWarmup) {
        early_min = std::min(early_min, curve[j]);
      } else {
        late_lo = std::min(late_lo, curve[j]);
        late_hi = std::max(late_hi, curve[j]);
      }
    }
    const bool ok = curve.size() == static_cast<std::size_t>(kTrialsPerRun) && early_min > 1.0 &&
                    late_lo >= kLateLo && late_hi <= kLateHi;
    curves_ok = curves_ok && ok;
    detail += fmt::format("{}: min(1-5)={:.3f} range(6+)=[{:.3f},{:.3f}]; ", want.name, early_min, late_lo, late_hi);
  }
  o.pass = exact && curves_ok;
  o.detail = fmt::format("k=5 removes trials 1-5 exactly: {}; {}{} runs per condition", exact ? "yes" : "no", detail,
                         kLearningRuns);
  return o;
}

// ------------------------------------------------------------------ motion accounting

Outcome motion() {
  Outcome o;
  const auto email_text = testsupport::read_file(testsupport::data_dir() / "scenarios/email_mockup.json");
  const Scenario email = load_scenario(email_text);
  // fixture geometry read straight from the JSON
  const auto doc = nlohmann::json::parse(email_text);
  auto fixture_distance = [&](const std::string& id) {
    const double cx = doc["cursor"]["x"], cy = doc["cursor"]["y"];
    for (const auto& screen : doc["screens"]) {
      for (const auto& t : screen["targets"]) {
        if (t["id"] == id) return std::hypot(t["x"].get<double>() - cx, t["y"].get<double>() - cy);
      }
    }
    return std::nan("");
  };
  const std::vector<std::string> flow = {"reply", "send"};
  const auto res = replay_scenario(email, script_accepts(email, flow), PadConfig{}, flow);
  int clicks = 0, accepts = 0;
  double worst = res.steps.size() == flow.size() ? 0.0 : INFINITY;
  for (const auto& r : res.log.records) clicks += r.clicks;
  for (std::size_t i = 0; i < res.steps.size() && i < flow.size(); ++i) {
    const auto& s = res.steps[i];
    if (s.accepted) ++accepts;
    worst = std::max(worst, std::abs(s.saved_px - fixture_distance(flow[i])));
    if (s.target_id != flow[i]) worst = INFINITY;
  }
  const bool email_ok = clicks == 0 && accepts == 2 && res.completed && worst <= kMotionTol;

  const Scenario five =
      load_scenario(testsupport::read_file(std::filesystem::path(PADBENCH_TEST_DATA_DIR) / "five_targets.json"));
  const std::vector<std::string> all = {"east", "south", "steep", "shallow", "west"};
  const auto five_res = replay_scenario(five, script_accepts(five, all), PadConfig{}, all);
  const auto totals = motion_accounting(five_res.log);
  int five_clicks = 0;
  for (const auto& r : five_res.log.records) five_clicks += r.clicks;
  const bool five_ok = totals.accepts == 5 && five_clicks == 0 && std::abs(totals.total_saved_px - 3000.0) <= kMotionTol;

  o.pass = email_ok && five_ok;
  o.detail = fmt::format("email: clicks={} accepts={} completed={} max |saved-geometry|={:.2e}; "
                         "five targets: accepts={} clicks={} saved={:.9g}px (expect 3000)",
                         clicks, accepts, res.completed, worst, totals.accepts, five_clicks, totals.total_saved_px);
  return o;
}

// ------------------------------------------------------------------ csv

Outcome csv() {
  Outcome o;
  std::size_t logs = 0, identical = 0;
  for (const auto& rep : table_run().reps) {
    for (const auto& [_, list] : rep.raw) {
      for (const auto& log : list) {
        const auto text = export_csv(log);
        ++logs;
        if (export_csv(parse_csv(text)) == text) ++identical;
      }
    }
  }
  const std::string header =
      "#padbench,v1,run_id=a,condition=b,device=pad,profile=x,seed=1\n"
      "trial_idx,id_bits,amplitude_px,width_px,mt_ms,error,strokes,keypresses,clicks,previews,cycles,discards,"
      "pointer_travel_px,saved_px\n";
  const std::string row = "1,5,1550,50,1000,0,1,0,1,0,0,0,1500,0\n";
  const std::vector<std::pair<std::string, std::size_t>> bad = {
      {"", 1},
      {"#padbench,v2,run_id=a,condition=b,device=pad,profile=x,seed=1\n", 1},
      {"#padbench,v1,run_id=a,condition=b,device=pad,profile=x,seed=1\n", 2},
      {header + "1,5,1550,50,1000,0,1,0,1,0,0,0,1500\n", 3},
      {header + row + "2,5,1550,50,fast,0,1,0,1,0,0,0,1500,0\n", 4},
      {header + row + row, 4},
      {header + row + "2,5,1550,50,1000,0,1,0,1,0,0,0,1500,0\n" + "3,5,1550,50,1000,7,1,0,1,0,0,0,1500,0\n", 5}};
  std::size_t located = 0;
  for (const auto& [text, line] : bad) {
    try {
      parse_csv(text);
    } catch (const CsvError& e) {
      if (e.line() == line) ++located;
    }
  }
  o.pass = logs > 0 && identical == logs && located == bad.size();
  o.detail = fmt::format("{}/{} simulated logs byte-identical after parse+export; {}/{} malformed files rejected "
                         "at the right line",
                         identical, logs, located, bad.size());
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"grammar-conformance", grammar},
      {"distribution-conformance", distribution},
      {"id-math", id_math},
      {"regression-oracle", regression},
      {"summary-table-reproduction", table_reproduction},
      {"slopes-and-tp-gap", slopes_and_gap},
      {"warm-up-handling", warmup},
      {"motion-accounting", motion},
      {"csv-round-trip", csv}};
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    if (!o.pass) ++failed;
    std::printf("%s %s: %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
