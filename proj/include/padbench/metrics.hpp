#pragma once

// Analytics over RunLogs: throughput, error and stroke statistics, warm-up
// handling, MT-vs-ID regression and motion accounting.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "padbench/run_log.hpp"

namespace padbench {

class MetricsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Drops trials with trial_idx <= k. The result records k in
/// warmup_excluded; an emptied log carries a warning.
RunLog exclude_warmup(const RunLog& log, int k = 5);

struct ThroughputSummary {
  std::size_t n = 0;
  double mean_bps = 0.0;
  double median_bps = 0.0;
  double sd_bps = 0.0;  // sample standard deviation, 0 for n = 1
  Interval ci95;        // mean +- 1.96 sd / sqrt(n)
};

/// Per-trial TP = id_bits / (mt_ms / 1000). Throws MetricsError on an empty
/// input or a record with non-positive ID or time.
ThroughputSummary throughput(const std::vector<TrialRecord>& records);
ThroughputSummary throughput(const RunLog& log);

struct RegressionFit {
  double slope = 0.0;      // ms/bit
  double intercept = 0.0;  // ms
  double r2 = 0.0;
  Interval slope_ci95;
  Interval intercept_ci95;
  std::size_t n = 0;
};

/// Ordinary least squares of y on x; 95% intervals from Student's t with
/// n - 2 degrees of freedom. Needs at least three points and two distinct x.
RegressionFit fit_linear(const std::vector<std::pair<double, double>>& points);

/// (id_bits, mt_ms) pairs of every record.
std::vector<std::pair<double, double>> mt_vs_id(const std::vector<TrialRecord>& records);

struct Proportion {
  std::size_t successes = 0;
  std::size_t n = 0;
  double rate = 0.0;
  Interval ci95;  // Wilson score interval
};

Proportion error_rate(const std::vector<TrialRecord>& records);
Proportion error_rate(const RunLog& log);

struct StrokeStats {
  double mean = 0.0;
  int min = 0;
  int max = 0;
};

StrokeStats stroke_stats(const std::vector<TrialRecord>& records);
StrokeStats stroke_stats(const RunLog& log);

struct MotionTotals {
  double total_travel_px = 0.0;
  double total_saved_px = 0.0;
  int accepts = 0;
  std::optional<double> saved_per_accept_px;  // absent without accepts
};

MotionTotals motion_accounting(const std::vector<TrialRecord>& records);
MotionTotals motion_accounting(const RunLog& log);

/// Mean movement time at each trial ordinal (index 0 is ordinal 1) across the
/// logs, divided by the mean time over all trials with ordinal > 5 (or over
/// all trials when no log is that long).
std::vector<double> learning_curve(const std::vector<RunLog>& logs);

/// Counts pointer gesture segments in a sampled pointer trace: a new segment
/// starts after a pause of at least `pause_ms` or when contact is lost.
struct PointerSample {
  double t_ms = 0.0;
  double x = 0.0;
  double y = 0.0;
  bool contact = true;
};
int count_pointer_strokes(const std::vector<PointerSample>& samples, double pause_ms = 100.0);

struct SummaryColumn {
  std::string condition;
  std::size_t n_trials = 0;
  StrokeStats strokes;
  ThroughputSummary tp;
  Proportion errors;
};

struct SummaryTable {
  std::vector<SummaryColumn> columns;
  /// True when any contributing log still carries its warm-up trials.
  bool includes_warmup = false;

  static const std::vector<std::string>& row_labels();
  /// Rendered cells, row-major, one row per row_labels() entry.
  std::vector<std::vector<std::string>> cells() const;
  std::string to_text() const;
};

/// Pools the trials of every log under each condition name.
SummaryTable summary_table(const std::map<std::string, std::vector<RunLog>>& logs_by_condition);

}  // namespace padbench
