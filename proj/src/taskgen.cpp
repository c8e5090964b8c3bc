#include "padbench/taskgen.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace padbench {

double index_of_difficulty(double amplitude_px, double width_px) {
  if (!(amplitude_px > 0.0) || !(width_px > 0.0)) {
    throw std::invalid_argument(fmt::format(
        "index of difficulty needs positive A and W (got A={}, W={})", amplitude_px, width_px));
  }
  return std::log2(amplitude_px / width_px + 1.0);
}

Point RingLayout::target(int i) const {
  const double angle = 2.0 * std::numbers::pi * i / n_targets;
  const double r = amplitude / 2.0;
  return {center.x + r * std::sin(angle), center.y - r * std::cos(angle)};
}

RingLayout make_ring(int n_targets, double amplitude, double width, Point center) {
  if (n_targets < 3 || n_targets % 2 == 0) {
    throw std::invalid_argument(
        fmt::format("ring needs an odd target count of at least 3, got {}", n_targets));
  }
  if (!(width > 0.0) || !(amplitude > width)) {
    throw std::invalid_argument(
        fmt::format("ring needs A > W > 0 (got A={}, W={})", amplitude, width));
  }
  return {n_targets, amplitude, width, center};
}

RingLayout layout_for_id(double id_bits, double width, int n_targets, Point center) {
  if (!(id_bits > 0.0)) {
    throw std::invalid_argument(fmt::format("ID must be positive, got {}", id_bits));
  }
  return make_ring(n_targets, width * (std::exp2(id_bits) - 1.0), width, center);
}

TrialPlan trial_sequence(const RingLayout& layout, int n_trials) {
  if (n_trials < 1) throw std::invalid_argument("n_trials must be at least 1");
  TrialPlan plan{layout, {}};
  const int n = layout.n_targets;
  const int stride = (n + 1) / 2;
  plan.order.reserve(static_cast<std::size_t>(n_trials));
  for (int j = 0; j < n_trials; ++j) {
    plan.order.push_back(static_cast<int>((static_cast<long long>(j) * stride) % n));
  }
  return plan;
}

}  // namespace padbench
