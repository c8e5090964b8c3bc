#include "padbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

namespace padbench {

namespace {

constexpr double kZ95 = 1.96;

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

RunLog exclude_warmup(const RunLog& log, int k) {
  if (k < 0) throw std::invalid_argument("warm-up count must be non-negative");
  RunLog out;
  out.header = log.header;
  out.warnings = log.warnings;
  std::copy_if(log.records.begin(), log.records.end(), std::back_inserter(out.records),
               [k](const TrialRecord& r) { return r.trial_idx > k; });
  out.warmup_excluded = std::max(k, log.warmup_excluded.value_or(0));
  if (out.records.empty() && !log.records.empty()) {
    out.warnings.push_back(fmt::format("warm-up exclusion (k={}) removed every trial", k));
  }
  return out;
}

ThroughputSummary throughput(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw MetricsError("throughput of an empty log");
  std::vector<double> tp;
  tp.reserve(records.size());
  for (const auto& r : records) {
    if (!(r.id_bits > 0.0) || !(r.mt_ms > 0.0)) {
      throw MetricsError(fmt::format("trial {} has non-positive ID or movement time", r.trial_idx));
    }
    tp.push_back(r.throughput_bps());
  }
  ThroughputSummary s;
  s.n = tp.size();
  const double n = static_cast<double>(s.n);
  s.mean_bps = std::accumulate(tp.begin(), tp.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : tp) ss += (v - s.mean_bps) * (v - s.mean_bps);
  s.sd_bps = s.n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.median_bps = median_of(std::move(tp));
  const double half = kZ95 * s.sd_bps / std::sqrt(n);
  s.ci95 = {s.mean_bps - half, s.mean_bps + half};
  return s;
}

ThroughputSummary throughput(const RunLog& log) { return throughput(log.records); }

RegressionFit fit_linear(const std::vector<std::pair<double, double>>& points) {
  const std::size_t n = points.size();
  if (n < 3) throw MetricsError(fmt::format("regression needs at least 3 points, got {}", n));

  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (!(sxx > 0.0)) throw MetricsError("regression needs at least two distinct x values");

  RegressionFit fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;

  double sse = 0.0;
  for (const auto& [x, y] : points) {
    const double e = y - (fit.intercept + fit.slope * x);
    sse += e * e;
  }
  const double dof = static_cast<double>(n - 2);
  const double s2 = sse / dof;
  const double se_slope = std::sqrt(s2 / sxx);
  const double se_intercept = std::sqrt(s2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
  const boost::math::students_t dist(dof);
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  fit.slope_ci95 = {fit.slope - t * se_slope, fit.slope + t * se_slope};
  fit.intercept_ci95 = {fit.intercept - t * se_intercept, fit.intercept + t * se_intercept};
  return fit;
}

std::vector<std::pair<double, double>> mt_vs_id(const std::vector<TrialRecord>& records) {
  std::vector<std::pair<double, double>> out;
  out.reserve(records.size());
  for (const auto& r : records) out.emplace_back(r.id_bits, r.mt_ms);
  return out;
}

Proportion error_rate(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw MetricsError("error rate of an empty log");
  Proportion p;
  p.n = records.size();
  p.successes = static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const TrialRecord& r) { return r.error; }));
  const double n = static_cast<double>(p.n);
  p.rate = static_cast<double>(p.successes) / n;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double centre = (p.rate + z2 / (2.0 * n)) / denom;
  const double half =
      kZ95 * std::sqrt(p.rate * (1.0 - p.rate) / n + z2 / (4.0 * n * n)) / denom;
  p.ci95 = {std::max(0.0, centre - half), std::min(1.0, centre + half)};
  return p;
}

Proportion error_rate(const RunLog& log) { return error_rate(log.records); }

StrokeStats stroke_stats(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw MetricsError("stroke statistics of an empty log");
  StrokeStats s;
  s.min = records.front().strokes;
  s.max = records.front().strokes;
  double total = 0.0;
  for (const auto& r : records) {
    total += r.strokes;
    s.min = std::min(s.min, r.strokes);
    s.max = std::max(s.max, r.strokes);
  }
  s.mean = total / static_cast<double>(records.size());
  return s;
}

StrokeStats stroke_stats(const RunLog& log) { return stroke_stats(log.records); }

MotionTotals motion_accounting(const std::vector<TrialRecord>& records) {
  MotionTotals m;
  for (const auto& r : records) {
    m.total_travel_px += r.pointer_travel_px;
    m.total_saved_px += r.saved_px;
    m.accepts += r.accepts();
  }
  if (m.accepts > 0) m.saved_per_accept_px = m.total_saved_px / m.accepts;
  return m;
}

MotionTotals motion_accounting(const RunLog& log) { return motion_accounting(log.records); }

std::vector<double> learning_curve(const std::vector<RunLog>& logs) {
  std::map<int, std::pair<double, int>> by_ordinal;
  double late_sum = 0.0, all_sum = 0.0;
  int late_n = 0, all_n = 0;
  for (const auto& log : logs) {
    for (const auto& r : log.records) {
      auto& slot = by_ordinal[r.trial_idx];
      slot.first += r.mt_ms;
      slot.second += 1;
      all_sum += r.mt_ms;
      ++all_n;
      if (r.trial_idx > 5) {
        late_sum += r.mt_ms;
        ++late_n;
      }
    }
  }
  std::vector<double> curve;
  if (all_n == 0) return curve;
  const double norm = late_n > 0 ? late_sum / late_n : all_sum / all_n;
  const int last = by_ordinal.rbegin()->first;
  curve.assign(static_cast<std::size_t>(last), std::nan(""));
  for (const auto& [j, slot] : by_ordinal) {
    curve[static_cast<std::size_t>(j - 1)] = slot.first / slot.second / norm;
  }
  return curve;
}

int count_pointer_strokes(const std::vector<PointerSample>& samples, double pause_ms) {
  int strokes = 0;
  bool in_stroke = false;
  double last_move_t = 0.0;
  const PointerSample* prev = nullptr;
  for (const auto& s : samples) {
    if (!s.contact) {
      in_stroke = false;
      prev = nullptr;
      continue;
    }
    const bool moved = prev && (s.x != prev->x || s.y != prev->y);
    if (moved) {
      if (!in_stroke || s.t_ms - last_move_t >= pause_ms) ++strokes;
      in_stroke = true;
      last_move_t = s.t_ms;
    }
    prev = &s;
  }
  return strokes;
}

const std::vector<std::string>& SummaryTable::row_labels() {
  static const std::vector<std::string> labels = {
      "N trials",
      "Mean stroke (gesture segments or keypresses per trial)",
      "Min stroke count",
      "Max stroke count",
      "mean TP 95% CI (bps)",
      "Median TP (bps)",
      "SD TP (bps)"};
  return labels;
}

std::vector<std::vector<std::string>> SummaryTable::cells() const {
  std::vector<std::vector<std::string>> rows(row_labels().size());
  for (const auto& c : columns) {
    rows[0].push_back(fmt::format("{}", c.n_trials));
    rows[1].push_back(fmt::format("{:.2f}", c.strokes.mean));
    rows[2].push_back(fmt::format("{}", c.strokes.min));
    rows[3].push_back(fmt::format("{}", c.strokes.max));
    rows[4].push_back(fmt::format("{:.1f} [{:.1f},{:.1f}]", c.tp.mean_bps, c.tp.ci95.lo, c.tp.ci95.hi));
    rows[5].push_back(fmt::format("{:.1f}", c.tp.median_bps));
    rows[6].push_back(fmt::format("{:.1f}", c.tp.sd_bps));
  }
  return rows;
}

std::string SummaryTable::to_text() const {
  const auto rows = cells();
  std::size_t label_w = 0;
  for (const auto& l : row_labels()) label_w = std::max(label_w, l.size());
  std::vector<std::size_t> col_w;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    std::size_t w = columns[c].condition.size();
    for (const auto& row : rows) w = std::max(w, row[c].size());
    col_w.push_back(w);
  }
  std::string out = fmt::format("{:<{}}", "", label_w);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out += fmt::format("  {:>{}}", columns[c].condition, col_w[c]);
  }
  out += '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out += fmt::format("{:<{}}", row_labels()[r], label_w);
    for (std::size_t c = 0; c < columns.size(); ++c) {
      out += fmt::format("  {:>{}}", rows[r][c], col_w[c]);
    }
    out += '\n';
  }
  if (includes_warmup) out += "(includes warm-up trials)\n";
  return out;
}

SummaryTable summary_table(const std::map<std::string, std::vector<RunLog>>& logs_by_condition) {
  SummaryTable table;
  for (const auto& [condition, logs] : logs_by_condition) {
    std::vector<TrialRecord> pooled;
    for (const auto& log : logs) {
      pooled.insert(pooled.end(), log.records.begin(), log.records.end());
      if (!log.warmup_excluded || *log.warmup_excluded == 0) table.includes_warmup = true;
    }
    if (pooled.empty()) continue;
    SummaryColumn col;
    col.condition = condition;
    col.n_trials = pooled.size();
    col.strokes = stroke_stats(pooled);
    col.tp = throughput(pooled);
    col.errors = error_rate(pooled);
    table.columns.push_back(std::move(col));
  }
  return table;
}

}  // namespace padbench
