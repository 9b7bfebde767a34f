#include "oddson/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oddson {

namespace {

struct Interval {
  double lo = 0, hi = 0;
  bool ok = false;
};

// Offsets c for which each closed side of the line n.x = c holds at most
// ceil(s/2) of the projected values.  Open interval; empty when the median
// values are tied.
Interval balance_interval(std::vector<double> projs) {
  std::sort(projs.begin(), projs.end());
  const int s = static_cast<int>(projs.size());
  if (s == 0) return {-1e18, 1e18, true};
  if (s == 1) return {projs[0] - 1, projs[0] + 1, true};
  const double lo = projs[s / 2 - 1];
  const double hi = projs[(s + 1) / 2];
  if (!(lo < hi)) return {};
  return {lo, hi, true};
}

std::vector<double> project(const std::vector<Point>& pts, const std::vector<int>& idx,
                            double nx, double ny) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(nx * pts[i][0] + ny * pts[i][1]);
  return out;
}

// Midpoint of the largest projection-free gap inside (lo, hi); keeps sample
// points off the chosen line.
double pick_offset(double lo, double hi, const std::vector<double>& projs) {
  std::vector<double> vals = {lo, hi};
  for (double v : projs)
    if (lo < v && v < hi) vals.push_back(v);
  std::sort(vals.begin(), vals.end());
  double best_gap = -1, best_mid = 0.5 * (lo + hi);
  for (size_t i = 0; i + 1 < vals.size(); ++i) {
    const double gap = vals[i + 1] - vals[i];
    if (gap > best_gap) {
      best_gap = gap;
      best_mid = 0.5 * (vals[i] + vals[i + 1]);
    }
  }
  return best_mid;
}

int cell_of(const Point& p, const HalfPlane& l1, const HalfPlane& l2) {
  const double e1 = l1.eval(p);
  const double e2 = l2.eval(p);
  if (e1 >= 0 && e2 >= 0) return 0;
  if (e1 <= 0 && e2 >= 0) return 1;
  if (e1 <= 0 && e2 <= 0) return 2;
  return 3;
}

std::vector<std::vector<int>> assign_cells(const std::vector<Point>& pts,
                                           const HalfPlane& l1, const HalfPlane& l2) {
  std::vector<std::vector<int>> out(4);
  for (int i = 0; i < static_cast<int>(pts.size()); ++i)
    out[cell_of(pts[i], l1, l2)].push_back(i);
  return out;
}

bool cells_balanced(const std::vector<Point>& pts, const HalfPlane& l1,
                    const HalfPlane& l2) {
  const int cap = (static_cast<int>(pts.size()) + 3) / 4;
  int counts[4] = {0, 0, 0, 0};
  for (const Point& p : pts)
    if (++counts[cell_of(p, l1, l2)] > cap) return false;
  return true;
}

std::vector<ConvexRegion> wedge_cells(const HalfPlane& l1, const HalfPlane& l2) {
  const HalfPlane p1(l1.nx, l1.ny, l1.c), n1(-l1.nx, -l1.ny, -l1.c);
  const HalfPlane p2(l2.nx, l2.ny, l2.c), n2(-l2.nx, -l2.ny, -l2.c);
  // CCW from the l1-positive / l2-positive wedge.
  return {ConvexRegion({n1, n2}), ConvexRegion({p1, n2}), ConvexRegion({p1, p2}),
          ConvexRegion({n1, p2})};
}

TwoLineSplit finish(const std::vector<Point>& pts, const HalfPlane& l1,
                    const HalfPlane& l2) {
  TwoLineSplit s;
  s.line1 = l1;
  s.line2 = l2;
  s.cells = wedge_cells(l1, l2);
  s.assigned = assign_cells(pts, l1, l2);
  return s;
}

constexpr double kAngleStep = 1.1999816148643266;  // irrational stride, radians

}  // namespace

TwoLineSplit two_line_split(const std::vector<Point>& sample, int /*depth*/) {
  const int m = static_cast<int>(sample.size());
  if (m == 0) throw std::invalid_argument("two_line_split: empty sample");

  std::vector<int> all(m);
  for (int i = 0; i < m; ++i) all[i] = i;

  // Line 1: vertical through the median x, rotated until the median
  // projections separate.
  HalfPlane l1;
  bool have_l1 = false;
  for (int j = 0; j < 200 && !have_l1; ++j) {
    const double phi = std::fmod(j * kAngleStep, M_PI);
    const double nx = std::cos(phi), ny = std::sin(phi);
    auto projs = project(sample, all, nx, ny);
    const Interval iv = balance_interval(projs);
    if (!iv.ok) continue;
    l1 = HalfPlane(nx, ny, pick_offset(iv.lo, iv.hi, projs));
    have_l1 = true;
  }
  if (!have_l1) {
    // All points coincide: two orthogonal lines through the point, everything
    // lands in the first cell.
    const Point& p = sample[0];
    return finish(sample, HalfPlane(1, 0, p[0]), HalfPlane(0, 1, p[1]));
  }

  std::vector<int> ga, gb;
  for (int i = 0; i < m; ++i) (l1.eval(sample[i]) <= 0 ? ga : gb).push_back(i);

  // Line 2: a direction where one offset simultaneously balances both groups
  // (discrete ham-sandwich), found by scanning directions and bisecting on the
  // gap between the two groups' feasible offset intervals.
  auto try_angle = [&](double theta, HalfPlane* out) {
    const double nx = std::cos(theta), ny = std::sin(theta);
    const Interval ia = balance_interval(project(sample, ga, nx, ny));
    const Interval ib = balance_interval(project(sample, gb, nx, ny));
    if (!ia.ok || !ib.ok) return std::numeric_limits<double>::quiet_NaN();
    const double lo = std::max(ia.lo, ib.lo);
    const double hi = std::min(ia.hi, ib.hi);
    if (lo < hi) {
      auto projs = project(sample, all, nx, ny);
      *out = HalfPlane(nx, ny, pick_offset(lo, hi, projs));
      return 0.0;
    }
    return 0.5 * (ia.lo + ia.hi) - 0.5 * (ib.lo + ib.hi);
  };

  const int grid = 96;
  std::vector<double> g(grid + 1, std::numeric_limits<double>::quiet_NaN());
  HalfPlane l2;
  for (int i = 0; i <= grid; ++i) {
    const double theta = i * M_PI / grid;
    const double gi = try_angle(theta, &l2);
    if (gi == 0.0 && cells_balanced(sample, l1, l2)) return finish(sample, l1, l2);
    g[i] = gi;
  }

  // Bisect every bracketing grid pair until the intervals overlap.
  for (int i = 0; i < grid; ++i) {
    if (std::isnan(g[i]) || std::isnan(g[i + 1])) continue;
    if (g[i] == 0 || g[i] * g[i + 1] > 0) continue;
    double ta = i * M_PI / grid, tb = (i + 1) * M_PI / grid;
    double fa = g[i];
    for (int it = 0; it < 200 && tb - ta > 1e-15; ++it) {
      const double tm = 0.5 * (ta + tb);
      const double gm = try_angle(tm, &l2);
      if (gm == 0.0 && cells_balanced(sample, l1, l2)) return finish(sample, l1, l2);
      if (std::isnan(gm)) break;
      if ((gm > 0) == (fa > 0)) {
        ta = tm;
        fa = gm;
      } else {
        tb = tm;
      }
    }
  }

  // Degenerate bracket: the ham-sandwich line passes through one point of each
  // group.  Try lines through near-median pairs with small nudges.
  auto near_median = [&](const std::vector<int>& grp) {
    std::vector<int> idx = grp;
    auto projs = project(sample, grp, l1.ny, -l1.nx);
    std::vector<double> sorted = projs;
    std::sort(sorted.begin(), sorted.end());
    const double med = sorted[sorted.size() / 2];
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      const double pa = l1.ny * sample[a][0] - l1.nx * sample[a][1];
      const double pb = l1.ny * sample[b][0] - l1.nx * sample[b][1];
      return std::abs(pa - med) < std::abs(pb - med);
    });
    if (idx.size() > 16) idx.resize(16);
    return idx;
  };
  for (int a : near_median(ga)) {
    for (int b : near_median(gb)) {
      const Point& pa = sample[a];
      const Point& pb = sample[b];
      const double dx = pb[0] - pa[0], dy = pb[1] - pa[1];
      if (dx == 0 && dy == 0) continue;
      const double scale = std::max({1.0, std::abs(dx), std::abs(dy)});
      for (double rot : {0.0, 1e-9, -1e-9}) {
        const double nx = -dy - rot * dx, ny = dx - rot * dy;
        for (double off : {0.0, 1e-9 * scale, -1e-9 * scale}) {
          HalfPlane cand;
          try {
            cand = HalfPlane(nx, ny, nx * pa[0] + ny * pa[1] + off);
          } catch (const std::invalid_argument&) {
            continue;
          }
          if (cells_balanced(sample, l1, cand)) return finish(sample, l1, cand);
        }
      }
    }
  }

  // Last resort: best grid configuration by max cell size.
  int best_max = m + 1;
  HalfPlane best = l1;
  for (int i = 0; i <= grid; ++i) {
    const double theta = i * M_PI / grid;
    const double nx = std::cos(theta), ny = std::sin(theta);
    const Interval ia = balance_interval(project(sample, ga, nx, ny));
    if (!ia.ok) continue;
    HalfPlane cand(nx, ny, 0.5 * (ia.lo + ia.hi));
    auto asg = assign_cells(sample, l1, cand);
    int mx = 0;
    for (const auto& cell : asg) mx = std::max(mx, static_cast<int>(cell.size()));
    if (mx < best_max) {
      best_max = mx;
      best = cand;
    }
  }
  return finish(sample, l1, best);
}

KdSplit kd_split(const std::vector<Point>& sample, int depth) {
  if (sample.empty()) throw std::invalid_argument("kd_split: empty sample");
  const int dim = static_cast<int>(sample[0].size());
  KdSplit s;
  s.axis = ((depth % dim) + dim) % dim;
  std::vector<double> vals;
  vals.reserve(sample.size());
  for (const Point& p : sample) vals.push_back(p[s.axis]);
  std::nth_element(vals.begin(), vals.begin() + (vals.size() - 1) / 2, vals.end());
  s.threshold = vals[(vals.size() - 1) / 2];  // lower median
  s.cells = {BoxRegion::half(dim, s.axis, false, s.threshold),
             BoxRegion::half(dim, s.axis, true, s.threshold)};
  s.assigned.assign(2, {});
  for (int i = 0; i < static_cast<int>(sample.size()); ++i)
    s.assigned[sample[i][s.axis] <= s.threshold ? 0 : 1].push_back(i);
  return s;
}

int crossing_count(const TwoLineSplit& split, const HalfPlane& line) {
  // Parametrize the line's boundary and test each wedge interior for a
  // feasible open t-interval.
  const Point p0 = {line.nx * line.c, line.ny * line.c};
  const double dx = -line.ny, dy = line.nx;
  int crossings = 0;
  for (const ConvexRegion& cell : split.cells) {
    double lo = -1e12, hi = 1e12;
    bool feasible = true;
    for (const HalfPlane& h : cell.constraints()) {
      const double a = h.eval(p0);
      const double b = h.nx * dx + h.ny * dy;
      const double slack = 1e-9 * (1.0 + std::abs(h.c));
      if (std::abs(b) < 1e-15) {
        if (a >= -slack) {
          feasible = false;
          break;
        }
      } else if (b > 0) {
        hi = std::min(hi, (-slack - a) / b);
      } else {
        lo = std::max(lo, (-slack - a) / b);
      }
    }
    if (feasible && lo < hi) ++crossings;
  }
  return crossings;
}

SplitOutcome<ConvexRegion> TwoLineRule::operator()(const std::vector<Point>& pts,
                                                   int depth) const {
  TwoLineSplit s = two_line_split(pts, depth);
  return {std::move(s.cells), std::move(s.assigned)};
}

SplitOutcome<BoxRegion> KdRule::operator()(const std::vector<Point>& pts,
                                           int depth) const {
  KdSplit s = kd_split(pts, depth);
  return {std::move(s.cells), std::move(s.assigned)};
}

}  // namespace oddson
