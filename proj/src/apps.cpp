#include "oddson/apps.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace oddson {

namespace {

// Monotone stand-in for atan2 around a center; CCW-increasing on [0, 4).
double pseudo_angle(double dx, double dy) {
  const double denom = std::abs(dx) + std::abs(dy);
  if (denom == 0) return 0;
  const double t = dx / denom;
  return dy >= 0 ? 1 - t : 3 + t;
}

double dist2(const Point& a, const Point& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

}  // namespace

// --- ConvexPolygonMembership ------------------------------------------------

ConvexPolygonMembership::ConvexPolygonMembership(std::vector<Point> ccw_vertices)
    : vertices_(std::move(ccw_vertices)) {
  if (vertices_.size() < 3)
    throw std::invalid_argument("polygon needs at least 3 vertices");
  double cx = 0, cy = 0;
  for (const Point& v : vertices_) {
    cx += v[0];
    cy += v[1];
  }
  anchor_ = {cx / vertices_.size(), cy / vertices_.size()};

  const int n = static_cast<int>(vertices_.size());
  std::vector<double> raw(n);
  for (int i = 0; i < n; ++i)
    raw[i] = pseudo_angle(vertices_[i][0] - anchor_[0], vertices_[i][1] - anchor_[1]);
  // Vertices are CCW around the interior anchor, so the angles are cyclically
  // increasing; rotate to the minimum to get a sorted array.
  const int start =
      static_cast<int>(std::min_element(raw.begin(), raw.end()) - raw.begin());
  angles_.resize(n);
  order_.resize(n);
  for (int k = 0; k < n; ++k) {
    order_[k] = (start + k) % n;
    angles_[k] = raw[order_[k]];
  }
}

BackupAnswer ConvexPolygonMembership::backup(const Point& q) const {
  BackupAnswer out;
  const int n = static_cast<int>(vertices_.size());
  const double a = pseudo_angle(q[0] - anchor_[0], q[1] - anchor_[1]);
  // Wedge between consecutive vertices (binary search over the fan).
  int j = static_cast<int>(std::upper_bound(angles_.begin(), angles_.end(), a) -
                           angles_.begin()) -
          1;
  out.ops = static_cast<std::int64_t>(std::ceil(std::log2(double(n)))) + 1;
  if (j < 0) j = n - 1;  // wrap wedge
  const Point& e1 = vertices_[order_[j]];
  const Point& e2 = vertices_[(order_[j] + 1) % n];
  out.answer = orientation(e1, e2, q) != Orient::Right ? kInside : kOutside;
  return out;
}

Answer ConvexPolygonMembership::scan(const Point& q) const {
  const int n = static_cast<int>(vertices_.size());
  for (int i = 0; i < n; ++i)
    if (orientation(vertices_[i], vertices_[(i + 1) % n], q) == Orient::Right)
      return kOutside;
  return kInside;
}

std::optional<Answer> ConvexPolygonMembership::interference(
    const ConvexRegion& region) const {
  if (region.empty()) return kUnreachable;
  const auto& rv = region.vertices();
  if (rv.size() < 3) return std::nullopt;

  for (const Point& v : vertices_)
    if (region.contains(v)) return std::nullopt;

  const int n = static_cast<int>(vertices_.size());
  const size_t k = rv.size();
  for (size_t i = 0; i < k; ++i) {
    const Point& a = rv[i];
    const Point& b = rv[(i + 1) % k];
    for (int e = 0; e < n; ++e) {
      // Closed-mode test keeps the verdict conservative: touching counts as
      // interference.
      if (segments_intersect(a, b, vertices_[e], vertices_[(e + 1) % n],
                             SegMode::Closed))
        return std::nullopt;
    }
  }
  return scan(region.anchor());
}

// --- PostOffice -------------------------------------------------------------

PostOffice::PostOffice(std::vector<Point> sites) : sites_(std::move(sites)) {
  if (sites_.empty()) throw std::invalid_argument("post office needs sites");
  std::vector<int> idx(sites_.size());
  std::iota(idx.begin(), idx.end(), 0);
  kd_.reserve(sites_.size());
  kd_root_ = build(idx, 0, static_cast<int>(idx.size()), 0);
}

int PostOffice::build(std::vector<int>& idx, int lo, int hi, int depth) {
  if (lo >= hi) return -1;
  const int axis = depth % 2;
  const int mid = (lo + hi) / 2;
  std::nth_element(idx.begin() + lo, idx.begin() + mid, idx.begin() + hi,
                   [&](int a, int b) {
                     return sites_[a][axis] < sites_[b][axis] ||
                            (sites_[a][axis] == sites_[b][axis] && a < b);
                   });
  const int id = static_cast<int>(kd_.size());
  kd_.push_back(KdNode{idx[mid], axis, -1, -1});
  const int left = build(idx, lo, mid, depth + 1);
  const int right = build(idx, mid + 1, hi, depth + 1);
  kd_[id].left = left;
  kd_[id].right = right;
  return id;
}

void PostOffice::nn(int node, const Point& q, double* best_d2, int* best_site,
                    std::int64_t* ops) const {
  if (node < 0) return;
  ++*ops;
  const KdNode& nd = kd_[node];
  const double d2 = dist2(q, sites_[nd.site]);
  if (d2 < *best_d2 || (d2 == *best_d2 && nd.site < *best_site)) {
    *best_d2 = d2;
    *best_site = nd.site;
  }
  const double diff = q[nd.axis] - sites_[nd.site][nd.axis];
  const int near = diff <= 0 ? nd.left : nd.right;
  const int far = diff <= 0 ? nd.right : nd.left;
  nn(near, q, best_d2, best_site, ops);
  // Equal axis distance may still hide an equidistant lower-index site.
  if (diff * diff <= *best_d2) nn(far, q, best_d2, best_site, ops);
}

BackupAnswer PostOffice::backup(const Point& q) const {
  BackupAnswer out;
  double best_d2 = std::numeric_limits<double>::infinity();
  int best_site = static_cast<int>(sites_.size());
  nn(kd_root_, q, &best_d2, &best_site, &out.ops);
  out.answer = best_site;
  return out;
}

Answer PostOffice::scan(const Point& q) const {
  double best = std::numeric_limits<double>::infinity();
  int best_site = 0;
  for (int i = 0; i < static_cast<int>(sites_.size()); ++i) {
    const double d2 = dist2(q, sites_[i]);
    if (d2 < best) {
      best = d2;
      best_site = i;
    }
  }
  return best_site;
}

std::optional<Answer> PostOffice::interference(const ConvexRegion& region) const {
  if (region.empty()) return kUnreachable;
  const auto& vs = region.vertices();
  if (vs.size() < 3) return std::nullopt;

  const int p = static_cast<int>(scan(vs[0]));
  // The region lies in the Voronoi cell of p iff every vertex does (both sets
  // are convex).  Sites with a smaller index would win distance ties, so the
  // cell test must be strict against them.
  for (int s = 0; s < static_cast<int>(sites_.size()); ++s) {
    if (s == p) continue;
    for (const Point& v : vs) {
      const double dp = dist2(v, sites_[p]);
      const double ds = dist2(v, sites_[s]);
      if (s < p ? dp >= ds : dp > ds) return std::nullopt;
    }
  }
  return p;
}

// --- RectCount --------------------------------------------------------------

RectCount::RectCount(std::vector<Point> points) : points_(std::move(points)) {
  std::sort(points_.begin(), points_.end(), [](const Point& a, const Point& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  const size_t n = points_.size();
  xs_.reserve(n);
  for (const Point& p : points_) xs_.push_back(p[0]);

  leaves_ = 1;
  while (leaves_ < std::max<size_t>(n, 1)) leaves_ *= 2;
  ys_.assign(2 * leaves_, {});
  for (size_t i = 0; i < n; ++i) ys_[leaves_ + i] = {points_[i][1]};
  for (size_t i = leaves_ - 1; i >= 1; --i) {
    ys_[i].resize(ys_[2 * i].size() + ys_[2 * i + 1].size());
    std::merge(ys_[2 * i].begin(), ys_[2 * i].end(), ys_[2 * i + 1].begin(),
               ys_[2 * i + 1].end(), ys_[i].begin());
  }
}

Answer RectCount::count_rect(double x1, double x2, double y1, double y2,
                             std::int64_t* ops) const {
  if (x1 > x2 || y1 > y2) return 0;
  size_t lo = std::lower_bound(xs_.begin(), xs_.end(), x1) - xs_.begin();
  size_t hi = std::upper_bound(xs_.begin(), xs_.end(), x2) - xs_.begin();
  if (ops) *ops += 2;
  Answer count = 0;
  for (lo += leaves_, hi += leaves_; lo < hi; lo /= 2, hi /= 2) {
    if (lo & 1) {
      const auto& ys = ys_[lo++];
      count += std::upper_bound(ys.begin(), ys.end(), y2) -
               std::lower_bound(ys.begin(), ys.end(), y1);
      if (ops) ++*ops;
    }
    if (hi & 1) {
      const auto& ys = ys_[--hi];
      count += std::upper_bound(ys.begin(), ys.end(), y2) -
               std::lower_bound(ys.begin(), ys.end(), y1);
      if (ops) ++*ops;
    }
  }
  return count;
}

BackupAnswer RectCount::backup(const Point& q4) const {
  BackupAnswer out;
  out.answer = count_rect(q4[0], q4[1], q4[2], q4[3], &out.ops);
  return out;
}

Answer RectCount::scan(const Point& q4) const {
  if (q4[0] > q4[1] || q4[2] > q4[3]) return 0;
  Answer count = 0;
  for (const Point& p : points_)
    if (p[0] >= q4[0] && p[0] <= q4[1] && p[1] >= q4[2] && p[1] <= q4[3]) ++count;
  return count;
}

std::optional<Answer> RectCount::interference(const BoxRegion& box) const {
  if (box.empty()) return kUnreachable;
  const auto& lo = box.lo();
  const auto& hi = box.hi();
  // The outer rectangle contains, and the inner rectangle is contained in,
  // every rectangle represented by the box; closed-rectangle counts are
  // monotone under inclusion.
  if (lo[0] > hi[1] || lo[2] > hi[3]) return 0;  // every rectangle inverted
  const Answer outer = count_rect(lo[0], hi[1], lo[2], hi[3], nullptr);
  if (hi[0] > lo[1] || hi[2] > lo[3]) {
    // Some rectangles empty, some not.
    if (outer == 0) return 0;
    return std::nullopt;
  }
  const Answer inner = count_rect(hi[0], lo[1], hi[2], lo[3], nullptr);
  if (inner == outer) return inner;
  return std::nullopt;
}

}  // namespace oddson
