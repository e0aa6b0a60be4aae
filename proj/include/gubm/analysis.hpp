#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "gubm/grid.hpp"

namespace gubm {

// All statistics run over adjacent pairs of real interaction signals
// (consecutive same-position events collapsed, no virtual start or end);
// the fitted model's virtual signals would bias the user-behavior fractions.

struct DirectionStats {
  std::size_t down_pairs = 0;      // next signal on a lower row
  std::size_t up_pairs = 0;        // next signal on a higher row
  std::size_t same_row_pairs = 0;  // excluded from the fractions
  bool empty = true;               // no row-changing pair found
  double down_fraction = 0.0;
  double up_fraction = 0.0;
};

DirectionStats direction_stats(const std::vector<Session>& sessions);

// Chebyshev-distance distribution of adjacent signal pairs, as fractions.
// Interaction pairs, not gaze pairs: reports must label it that way.
std::map<int, double> transition_distance_histogram(
    const std::vector<Session>& sessions);

struct InteractionCounts {
  std::size_t sessions = 0;
  std::size_t click_sessions = 0;  // at least one click
  std::size_t hover_sessions = 0;  // at least one hover
  std::size_t clicks = 0;
  std::size_t hovers = 0;
  double click_session_fraction = 0.0;
  double hover_click_ratio = 0.0;  // 0 when the log has no clicks
};

InteractionCounts interaction_counts(const std::vector<Session>& sessions);

}  // namespace gubm
