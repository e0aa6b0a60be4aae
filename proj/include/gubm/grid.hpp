#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gubm/errors.hpp"

namespace gubm {

struct GridPosition {
  int row = 0;
  int col = 0;

  friend bool operator==(const GridPosition&, const GridPosition&) = default;
};

// Two-dimensional result page: rows may hold different numbers of images.
class GridLayout {
 public:
  GridLayout() = default;
  explicit GridLayout(std::vector<int> row_counts);

  int num_rows() const { return static_cast<int>(row_counts_.size()); }
  int total() const { return total_; }
  const std::vector<int>& row_counts() const { return row_counts_; }
  int row_count(int row) const { return row_counts_[row]; }

  // Number of images in rows strictly above `row`.
  int row_prefix(int row) const { return prefix_[row]; }

  bool contains(GridPosition p) const {
    return p.row >= 0 && p.row < num_rows() && p.col >= 0 &&
           p.col < row_counts_[p.row];
  }

  GridPosition last_position() const {
    return {num_rows() - 1, row_counts_.back() - 1};
  }

  friend bool operator==(const GridLayout& a, const GridLayout& b) {
    return a.row_counts_ == b.row_counts_;
  }

 private:
  std::vector<int> row_counts_;
  std::vector<int> prefix_;
  int total_ = 0;
};

enum class EventKind { Click, Hover };

struct InteractionEvent {
  std::int64_t t_ms = 0;
  EventKind kind = EventKind::Hover;
  GridPosition position;
};

// One query session: the page layout, the image at every position (row-major)
// and the timestamp-ordered click/hover events.
struct Session {
  std::string session_id;
  std::string query_id;
  GridLayout layout;
  std::vector<InteractionEvent> events;
  std::vector<std::string> images;  // row-major, size == layout.total()

  const std::string& image_at(GridPosition p) const {
    return images[layout.row_prefix(p.row) + p.col];
  }
};

// Throws DataError when events are unsorted, positions fall outside the
// layout, or the image grid does not cover the page.
void validate_session(const Session& session);

// Interaction signals with the virtual start (0,0) prepended and a session-end
// marker appended. Consecutive events at one position collapse to a single
// signal, so length == collapsed events + 2. Path construction resolves the
// end marker to the last position in scan order under the active policy.
struct InteractionSequence {
  std::vector<GridPosition> signals;
};

InteractionSequence build_sequence(const Session& session);

// Chebyshev distance between two grid positions.
int transition_distance(GridPosition a, GridPosition b);

}  // namespace gubm
