#pragma once

// ISO 9241-9 multidirectional ring layouts and trial sequences.

#include <cstddef>
#include <vector>

#include "padbench/prediction.hpp"

namespace padbench {

/// Shannon index of difficulty, log2(A/W + 1), in bits.
/// Throws std::invalid_argument unless both arguments are positive.
double index_of_difficulty(double amplitude_px, double width_px);

struct RingLayout {
  int n_targets = 9;
  double amplitude = 0.0;  // diameter of the ring, px
  double width = 0.0;      // target diameter, px
  Point center;

  /// Target i sits at angle 2*pi*i/n measured clockwise from the top.
  Point target(int i) const;
  double id_bits() const { return index_of_difficulty(amplitude, width); }
};

/// Validates n_targets (odd, >= 3) and A > W > 0.
RingLayout make_ring(int n_targets, double amplitude, double width, Point center = {});

/// A = W * (2^ID - 1). Rejects layouts where A would not exceed W.
RingLayout layout_for_id(double id_bits, double width, int n_targets = 9, Point center = {});

struct TrialPlan {
  RingLayout layout;
  std::vector<int> order;
  int n_trials() const { return static_cast<int>(order.size()); }
};

/// order[j] = (j * ceil(n/2)) mod n: each target is followed by the one
/// (nearly) opposite it, and an odd ring is fully visited before repeating.
TrialPlan trial_sequence(const RingLayout& layout, int n_trials = 22);

}  // namespace padbench
