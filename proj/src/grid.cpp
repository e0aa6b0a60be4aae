#include "gubm/grid.hpp"

#include <algorithm>
#include <cstdlib>

namespace gubm {

GridLayout::GridLayout(std::vector<int> row_counts)
    : row_counts_(std::move(row_counts)) {
  if (row_counts_.empty()) {
    throw DataError("grid layout must have at least one row");
  }
  prefix_.reserve(row_counts_.size());
  for (std::size_t i = 0; i < row_counts_.size(); ++i) {
    if (row_counts_[i] < 1) {
      throw DataError("grid row " + std::to_string(i) +
                      " has non-positive image count " +
                      std::to_string(row_counts_[i]));
    }
    prefix_.push_back(total_);
    total_ += row_counts_[i];
  }
}

void validate_session(const Session& session) {
  if (session.layout.total() == 0) {
    throw DataError("session " + session.session_id + " has an empty layout");
  }
  if (static_cast<int>(session.images.size()) != session.layout.total()) {
    throw DataError("session " + session.session_id + " has " +
                    std::to_string(session.images.size()) +
                    " image ids for a grid of " +
                    std::to_string(session.layout.total()));
  }
  std::int64_t prev_t = 0;
  for (std::size_t i = 0; i < session.events.size(); ++i) {
    const InteractionEvent& e = session.events[i];
    if (!session.layout.contains(e.position)) {
      throw DataError("session " + session.session_id + " event " +
                      std::to_string(i) + " at (" +
                      std::to_string(e.position.row) + "," +
                      std::to_string(e.position.col) +
                      ") is outside the grid");
    }
    if (i > 0 && e.t_ms < prev_t) {
      throw DataError("session " + session.session_id + " event " +
                      std::to_string(i) + " is out of timestamp order");
    }
    prev_t = e.t_ms;
  }
}

InteractionSequence build_sequence(const Session& session) {
  validate_session(session);
  InteractionSequence seq;
  seq.signals.reserve(session.events.size() + 2);
  seq.signals.push_back({0, 0});
  for (const InteractionEvent& e : session.events) {
    // Hover followed by click on the same image is one signal.
    if (seq.signals.size() > 1 && seq.signals.back() == e.position) {
      continue;
    }
    seq.signals.push_back(e.position);
  }
  seq.signals.push_back(session.layout.last_position());
  return seq;
}

int transition_distance(GridPosition a, GridPosition b) {
  return std::max(std::abs(a.row - b.row), std::abs(a.col - b.col));
}

}  // namespace gubm
