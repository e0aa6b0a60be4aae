#include "gubm/analysis.hpp"

namespace gubm {

namespace {

std::vector<GridPosition> collapsed_signals(const Session& session) {
  std::vector<GridPosition> signals;
  for (const InteractionEvent& event : session.events) {
    if (signals.empty() || !(signals.back() == event.position)) {
      signals.push_back(event.position);
    }
  }
  return signals;
}

}  // namespace

DirectionStats direction_stats(const std::vector<Session>& sessions) {
  DirectionStats stats;
  for (const Session& session : sessions) {
    const std::vector<GridPosition> signals = collapsed_signals(session);
    for (std::size_t t = 0; t + 1 < signals.size(); ++t) {
      if (signals[t + 1].row > signals[t].row) {
        ++stats.down_pairs;
      } else if (signals[t + 1].row < signals[t].row) {
        ++stats.up_pairs;
      } else {
        ++stats.same_row_pairs;
      }
    }
  }
  const std::size_t changing = stats.down_pairs + stats.up_pairs;
  if (changing > 0) {
    stats.empty = false;
    stats.down_fraction =
        static_cast<double>(stats.down_pairs) / static_cast<double>(changing);
    stats.up_fraction =
        static_cast<double>(stats.up_pairs) / static_cast<double>(changing);
  }
  return stats;
}

std::map<int, double> transition_distance_histogram(
    const std::vector<Session>& sessions) {
  std::map<int, std::size_t> counts;
  std::size_t total = 0;
  for (const Session& session : sessions) {
    const std::vector<GridPosition> signals = collapsed_signals(session);
    for (std::size_t t = 0; t + 1 < signals.size(); ++t) {
      ++counts[transition_distance(signals[t], signals[t + 1])];
      ++total;
    }
  }
  std::map<int, double> fractions;
  for (const auto& [distance, count] : counts) {
    fractions[distance] =
        static_cast<double>(count) / static_cast<double>(total);
  }
  return fractions;
}

InteractionCounts interaction_counts(const std::vector<Session>& sessions) {
  InteractionCounts counts;
  counts.sessions = sessions.size();
  for (const Session& session : sessions) {
    bool has_click = false;
    bool has_hover = false;
    for (const InteractionEvent& event : session.events) {
      if (event.kind == EventKind::Click) {
        ++counts.clicks;
        has_click = true;
      } else {
        ++counts.hovers;
        has_hover = true;
      }
    }
    counts.click_sessions += has_click;
    counts.hover_sessions += has_hover;
  }
  if (counts.sessions > 0) {
    counts.click_session_fraction = static_cast<double>(counts.click_sessions) /
                                    static_cast<double>(counts.sessions);
  }
  if (counts.clicks > 0) {
    counts.hover_click_ratio = static_cast<double>(counts.hovers) /
                               static_cast<double>(counts.clicks);
  }
  return counts;
}

}  // namespace gubm
