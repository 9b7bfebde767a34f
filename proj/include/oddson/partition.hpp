#pragma once

#include <vector>

#include "oddson/geometry.hpp"

namespace oddson {

// Output of a split rule: child regions in routing order plus the
// first-containing-child assignment of the input sample indices.
template <class RegionT>
struct SplitOutcome {
  std::vector<RegionT> regions;
  std::vector<std::vector<int>> assigned;
};

// Two-line partition of a 2-D sample: four wedge cells, each holding at most
// ceil(m/4) samples, and no line crosses more than 3 cell interiors.
struct TwoLineSplit {
  HalfPlane line1, line2;  // boundaries n.x = c
  std::vector<ConvexRegion> cells;  // 4 wedges, CCW from the ++ wedge
  std::vector<std::vector<int>> assigned;
};

TwoLineSplit two_line_split(const std::vector<Point>& sample, int depth);

// Axis-median halving for the comparison model; axis cycles with depth.
struct KdSplit {
  int axis = 0;
  double threshold = 0;
  std::vector<BoxRegion> cells;  // {axis <= t}, {axis >= t}
  std::vector<std::vector<int>> assigned;
};

KdSplit kd_split(const std::vector<Point>& sample, int depth);

// Number of cell interiors whose interior the given line's boundary crosses.
int crossing_count(const TwoLineSplit& split, const HalfPlane& line);

struct TwoLineRule {
  using Region = ConvexRegion;
  static constexpr int arity = 4;
  SplitOutcome<ConvexRegion> operator()(const std::vector<Point>& pts, int depth) const;
};

struct KdRule {
  using Region = BoxRegion;
  static constexpr int arity = 2;
  SplitOutcome<BoxRegion> operator()(const std::vector<Point>& pts, int depth) const;
};

}  // namespace oddson
