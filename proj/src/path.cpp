#include "gubm/path.hpp"

#include <cmath>
#include <cstdlib>

namespace gubm {

DirectionPolicy policy_from_string(const std::string& name) {
  if (name == "ltor") return {InRowDirection::LtoR};
  if (name == "rtol") return {InRowDirection::RtoL};
  if (name == "zshape") return {InRowDirection::Zshape};
  if (name == "zshape-r") return {InRowDirection::Zshape, true};
  throw DataError("unknown direction policy '" + name +
                  "' (expected ltor, rtol or zshape)");
}

std::string policy_to_string(const DirectionPolicy& policy) {
  switch (policy.variant) {
    case InRowDirection::LtoR:
      return "ltor";
    case InRowDirection::RtoL:
      return "rtol";
    case InRowDirection::Zshape:
      return policy.zshape_row0_rtl ? "zshape-r" : "zshape";
  }
  return "zshape";
}

int linearize(const GridLayout& layout, GridPosition p,
              const DirectionPolicy& policy) {
  if (!layout.contains(p)) {
    throw DataError("position (" + std::to_string(p.row) + "," +
                    std::to_string(p.col) + ") is outside the grid");
  }
  const int prefix = layout.row_prefix(p.row);
  if (policy.scans_left_to_right(p.row)) {
    return prefix + p.col;
  }
  return prefix + layout.row_count(p.row) - p.col - 1;
}

GridPosition delinearize(const GridLayout& layout, int index,
                         const DirectionPolicy& policy) {
  if (index < 0 || index >= layout.total()) {
    throw DataError("scan index " + std::to_string(index) +
                    " is outside [0," + std::to_string(layout.total()) + ")");
  }
  int row = layout.num_rows() - 1;
  while (layout.row_prefix(row) > index) {
    --row;
  }
  const int offset = index - layout.row_prefix(row);
  const int col = policy.scans_left_to_right(row)
                      ? offset
                      : layout.row_count(row) - offset - 1;
  return {row, col};
}

ImagePath build_path(const GridLayout& layout, GridPosition a, GridPosition b,
                     const DirectionPolicy& policy) {
  ImagePath path;
  path.start_lin = linearize(layout, a, policy);
  path.end_lin = linearize(layout, b, policy);
  path.direction = path.end_lin >= path.start_lin ? PathDirection::Down
                                                  : PathDirection::Up;
  const int step = path.direction == PathDirection::Down ? 1 : -1;
  path.positions.reserve(std::abs(path.end_lin - path.start_lin) + 1);
  for (int k = path.start_lin;; k += step) {
    path.positions.push_back(delinearize(layout, k, policy));
    if (k == path.end_lin) break;
  }
  return path;
}

}  // namespace gubm
