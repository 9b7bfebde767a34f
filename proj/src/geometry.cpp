#include "oddson/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace oddson {

namespace {

double linf(const Point& p) {
  double m = 0;
  for (double v : p) m = std::max(m, std::abs(v));
  return m;
}

double vertex_tol(const Point& p) { return kContainTol * (1.0 + linf(p)); }

}  // namespace

Orient orientation(const Point& a, const Point& b, const Point& c) {
  const double ux = b[0] - a[0], uy = b[1] - a[1];
  const double vx = c[0] - a[0], vy = c[1] - a[1];
  const double cross = ux * vy - uy * vx;
  const double scale =
      std::max(std::abs(ux), std::abs(uy)) * std::max(std::abs(vx), std::abs(vy));
  if (std::abs(cross) <= kOrientEps * std::max(1.0, scale)) return Orient::Collinear;
  return cross > 0 ? Orient::Left : Orient::Right;
}

namespace {

bool same_point(const Point& a, const Point& b) {
  return a[0] == b[0] && a[1] == b[1];
}

// Is q on the closed segment a-b, assuming a, b, q collinear?
bool on_segment(const Point& a, const Point& b, const Point& q) {
  return std::min(a[0], b[0]) - kContainTol <= q[0] &&
         q[0] <= std::max(a[0], b[0]) + kContainTol &&
         std::min(a[1], b[1]) - kContainTol <= q[1] &&
         q[1] <= std::max(a[1], b[1]) + kContainTol;
}

}  // namespace

bool segments_intersect(const Point& u, const Point& w, const Point& x,
                        const Point& y, SegMode mode) {
  if (mode == SegMode::Strict) {
    if (same_point(u, w) || same_point(x, y))
      throw std::invalid_argument("degenerate segment in Strict mode");
    const bool all_left = orientation(u, w, y) == Orient::Left &&
                          orientation(x, y, u) == Orient::Left &&
                          orientation(w, u, x) == Orient::Left &&
                          orientation(y, x, w) == Orient::Left;
    const bool all_right = orientation(u, w, y) == Orient::Right &&
                           orientation(x, y, u) == Orient::Right &&
                           orientation(w, u, x) == Orient::Right &&
                           orientation(y, x, w) == Orient::Right;
    return all_left || all_right;
  }

  const Orient o1 = orientation(u, w, x);
  const Orient o2 = orientation(u, w, y);
  const Orient o3 = orientation(x, y, u);
  const Orient o4 = orientation(x, y, w);

  if (o1 != o2 && o3 != o4 && o1 != Orient::Collinear && o2 != Orient::Collinear &&
      o3 != Orient::Collinear && o4 != Orient::Collinear)
    return true;

  if (o1 == Orient::Collinear && on_segment(u, w, x)) return true;
  if (o2 == Orient::Collinear && on_segment(u, w, y)) return true;
  if (o3 == Orient::Collinear && on_segment(x, y, u)) return true;
  if (o4 == Orient::Collinear && on_segment(x, y, w)) return true;
  return false;
}

HalfPlane::HalfPlane(double nx_, double ny_, double c_) {
  const double len = std::hypot(nx_, ny_);
  if (len == 0) throw std::invalid_argument("zero normal in HalfPlane");
  nx = nx_ / len;
  ny = ny_ / len;
  c = c_ / len;
}

HalfPlane HalfPlane::left_of(const Point& a, const Point& b) {
  const double dx = b[0] - a[0], dy = b[1] - a[1];
  return HalfPlane(dy, -dx, dy * a[0] - dx * a[1]);
}

ConvexRegion::ConvexRegion(std::vector<HalfPlane> constraints)
    : constraints_(std::move(constraints)) {
  rebuild_cache();
}

ConvexRegion ConvexRegion::box(double x0, double y0, double x1, double y1) {
  return ConvexRegion({HalfPlane(-1, 0, -x0), HalfPlane(1, 0, x1),
                       HalfPlane(0, -1, -y0), HalfPlane(0, 1, y1)});
}

ConvexRegion ConvexRegion::working_box() {
  return box(-kWorkingBoxHalf, -kWorkingBoxHalf, kWorkingBoxHalf, kWorkingBoxHalf);
}

ConvexRegion ConvexRegion::from_ccw_vertices(const std::vector<Point>& vs) {
  std::vector<HalfPlane> hs;
  const size_t n = vs.size();
  for (size_t i = 0; i < n; ++i) {
    const Point& a = vs[i];
    const Point& b = vs[(i + 1) % n];
    if (same_point(a, b)) continue;
    hs.push_back(HalfPlane::left_of(a, b));
  }
  return ConvexRegion(std::move(hs));
}

ConvexRegion ConvexRegion::clipped(const HalfPlane& h) const {
  std::vector<HalfPlane> hs = constraints_;
  hs.push_back(h);
  return ConvexRegion(std::move(hs));
}

ConvexRegion ConvexRegion::intersect(const ConvexRegion& o) const {
  std::vector<HalfPlane> hs = constraints_;
  hs.insert(hs.end(), o.constraints_.begin(), o.constraints_.end());
  return ConvexRegion(std::move(hs));
}

bool ConvexRegion::contains(const Point& p) const {
  const double tol = vertex_tol(p);
  for (const HalfPlane& h : constraints_)
    if (h.eval(p) > tol) return false;
  return true;
}

bool ConvexRegion::bounded() const {
  // Bounded iff the constraint normals positively span the plane, i.e. the
  // largest cyclic gap between normal directions is < pi.
  if (constraints_.size() < 3) return false;
  std::vector<double> angles;
  angles.reserve(constraints_.size());
  for (const HalfPlane& h : constraints_) angles.push_back(std::atan2(h.ny, h.nx));
  std::sort(angles.begin(), angles.end());
  double max_gap = angles.front() + 2 * M_PI - angles.back();
  for (size_t i = 1; i < angles.size(); ++i)
    max_gap = std::max(max_gap, angles[i] - angles[i - 1]);
  return max_gap < M_PI - 1e-12;
}

void ConvexRegion::rebuild_cache() {
  vertices_.clear();
  empty_ = false;
  const size_t k = constraints_.size();
  if (k < 2) return;

  std::vector<Point> cand;
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = i + 1; j < k; ++j) {
      const HalfPlane& a = constraints_[i];
      const HalfPlane& b = constraints_[j];
      const double det = a.nx * b.ny - a.ny * b.nx;
      if (std::abs(det) < 1e-14) continue;
      Point p = {(a.c * b.ny - b.c * a.ny) / det, (a.nx * b.c - b.nx * a.c) / det};
      bool ok = true;
      const double tol = vertex_tol(p);
      for (const HalfPlane& h : constraints_) {
        if (h.eval(p) > tol) {
          ok = false;
          break;
        }
      }
      if (ok) cand.push_back(std::move(p));
    }
  }

  // Dedupe.
  std::sort(cand.begin(), cand.end(), [](const Point& a, const Point& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  for (const Point& p : cand) {
    if (!vertices_.empty()) {
      const Point& q = vertices_.back();
      if (std::abs(p[0] - q[0]) <= vertex_tol(p) &&
          std::abs(p[1] - q[1]) <= vertex_tol(p))
        continue;
    }
    vertices_.push_back(p);
  }

  if (vertices_.empty()) {
    if (bounded()) empty_ = true;
    return;
  }

  // CCW order around the centroid.
  double cx = 0, cy = 0;
  for (const Point& p : vertices_) {
    cx += p[0];
    cy += p[1];
  }
  cx /= vertices_.size();
  cy /= vertices_.size();
  std::sort(vertices_.begin(), vertices_.end(), [&](const Point& a, const Point& b) {
    return std::atan2(a[1] - cy, a[0] - cx) < std::atan2(b[1] - cy, b[0] - cx);
  });
}

double triangle_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * std::abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
}

double ConvexRegion::area() const {
  if (vertices_.size() < 3) return 0;
  double s = 0;
  for (size_t i = 0; i < vertices_.size(); ++i) {
    const Point& a = vertices_[i];
    const Point& b = vertices_[(i + 1) % vertices_.size()];
    s += a[0] * b[1] - b[0] * a[1];
  }
  return 0.5 * std::abs(s);
}

Point ConvexRegion::anchor() const {
  if (vertices_.empty()) throw std::invalid_argument("anchor of vertexless region");
  double cx = 0, cy = 0;
  for (const Point& p : vertices_) {
    cx += p[0];
    cy += p[1];
  }
  return {cx / vertices_.size(), cy / vertices_.size()};
}

std::vector<std::array<Point, 3>> ConvexRegion::triangulate() const {
  if (!bounded()) throw std::invalid_argument("triangulate: unbounded region");
  if (empty_ || vertices_.size() < 3)
    throw std::invalid_argument("triangulate: empty or degenerate region");

  // Rotate the CCW cycle so the lexicographically smallest vertex leads.
  size_t lead = 0;
  for (size_t i = 1; i < vertices_.size(); ++i) {
    const Point& p = vertices_[i];
    const Point& q = vertices_[lead];
    if (p[0] < q[0] || (p[0] == q[0] && p[1] < q[1])) lead = i;
  }
  const size_t n = vertices_.size();
  std::vector<std::array<Point, 3>> tris;
  tris.reserve(n - 2);
  for (size_t i = 1; i + 1 < n; ++i)
    tris.push_back({vertices_[lead], vertices_[(lead + i) % n],
                    vertices_[(lead + i + 1) % n]});
  return tris;
}

Point sample_point(const ConvexRegion& region, std::mt19937_64& rng) {
  auto tris = region.triangulate();
  std::vector<double> cum;
  cum.reserve(tris.size());
  double total = 0;
  for (const auto& t : tris) {
    total += triangle_area(t[0], t[1], t[2]);
    cum.push_back(total);
  }
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double pick = uni(rng) * total;
  size_t idx = std::lower_bound(cum.begin(), cum.end(), pick) - cum.begin();
  if (idx >= tris.size()) idx = tris.size() - 1;
  const auto& t = tris[idx];
  double u = uni(rng), v = uni(rng);
  if (u + v > 1) {
    u = 1 - u;
    v = 1 - v;
  }
  return {t[0][0] + u * (t[1][0] - t[0][0]) + v * (t[2][0] - t[0][0]),
          t[0][1] + u * (t[1][1] - t[0][1]) + v * (t[2][1] - t[0][1])};
}

BoxRegion::BoxRegion(std::vector<double> lo, std::vector<double> hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size()) throw std::invalid_argument("box dim mismatch");
}

BoxRegion BoxRegion::cube(int dim, double half) {
  return BoxRegion(std::vector<double>(dim, -half), std::vector<double>(dim, half));
}

BoxRegion BoxRegion::half(int dim, int axis, bool upper, double t) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> lo(dim, -inf), hi(dim, inf);
  if (upper)
    lo[axis] = t;
  else
    hi[axis] = t;
  return BoxRegion(std::move(lo), std::move(hi));
}

bool BoxRegion::empty() const {
  for (size_t i = 0; i < lo_.size(); ++i)
    if (lo_[i] > hi_[i]) return true;
  return false;
}

bool BoxRegion::contains(const Point& p) const {
  for (size_t i = 0; i < lo_.size(); ++i)
    if (p[i] < lo_[i] || p[i] > hi_[i]) return false;
  return true;
}

BoxRegion BoxRegion::intersect(const BoxRegion& o) const {
  std::vector<double> lo(lo_), hi(hi_);
  for (size_t i = 0; i < lo.size(); ++i) {
    lo[i] = std::max(lo[i], o.lo_[i]);
    hi[i] = std::min(hi[i], o.hi_[i]);
  }
  return BoxRegion(std::move(lo), std::move(hi));
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

}  // namespace oddson
