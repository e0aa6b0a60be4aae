#pragma once

#include <string>
#include <vector>

#include "gubm/grid.hpp"

namespace gubm {

enum class InRowDirection { LtoR, RtoL, Zshape };

// Assigns a horizontal scan direction to every row. Zshape alternates row by
// row; the anchor fixes which way row 0 scans (left-to-right by default).
struct DirectionPolicy {
  InRowDirection variant = InRowDirection::Zshape;
  bool zshape_row0_rtl = false;

  bool scans_left_to_right(int row) const {
    switch (variant) {
      case InRowDirection::LtoR:
        return true;
      case InRowDirection::RtoL:
        return false;
      case InRowDirection::Zshape:
        return (row % 2 == 0) != zshape_row0_rtl;
    }
    return true;
  }

  friend bool operator==(const DirectionPolicy&, const DirectionPolicy&) =
      default;
};

DirectionPolicy policy_from_string(const std::string& name);
std::string policy_to_string(const DirectionPolicy& policy);

enum class PathDirection { Down, Up };

// Inclusive sequence of grid positions between two adjacent interaction
// signals, ordered by consecutive scan indices from start_lin to end_lin.
struct ImagePath {
  int start_lin = 0;  // scan index of the first signal
  int end_lin = 0;    // scan index of the second signal
  std::vector<GridPosition> positions;
  PathDirection direction = PathDirection::Down;
};

// Maps (row, col) to a single scan index: images above the row plus the
// offset within the row under the row's scan direction.
int linearize(const GridLayout& layout, GridPosition p,
              const DirectionPolicy& policy);

// Inverse of linearize for the same layout and policy.
GridPosition delinearize(const GridLayout& layout, int index,
                         const DirectionPolicy& policy);

ImagePath build_path(const GridLayout& layout, GridPosition a, GridPosition b,
                     const DirectionPolicy& policy);

}  // namespace gubm
