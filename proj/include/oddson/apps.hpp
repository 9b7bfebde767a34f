#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "oddson/core.hpp"
#include "oddson/geometry.hpp"

namespace oddson {

struct BackupAnswer {
  Answer answer = 0;
  std::int64_t ops = 0;
};

// Point-in-convex-polygon membership.  Backup is an O(log n) fan search from
// the centroid; the reference oracle is an O(n) edge scan.
class ConvexPolygonMembership {
 public:
  static constexpr Answer kOutside = 0;
  static constexpr Answer kInside = 1;

  explicit ConvexPolygonMembership(std::vector<Point> ccw_vertices);

  BackupAnswer backup(const Point& q) const;
  Answer scan(const Point& q) const;
  std::optional<Answer> interference(const ConvexRegion& region) const;

  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& interior_anchor() const { return anchor_; }

 private:
  std::vector<Point> vertices_;  // CCW, strictly convex
  Point anchor_;
  std::vector<double> angles_;  // pseudo-angles of vertices around the anchor
  std::vector<int> order_;      // vertex index per sorted angle position
};

// 2-D post-office (nearest site) queries.  Backup is a balanced k-d tree with
// standard pruning; ties resolve to the smallest site index.
class PostOffice {
 public:
  explicit PostOffice(std::vector<Point> sites);

  BackupAnswer backup(const Point& q) const;
  Answer scan(const Point& q) const;
  // Uniform(p) iff the region provably sits inside the Voronoi cell of p.
  std::optional<Answer> interference(const ConvexRegion& region) const;

  const std::vector<Point>& sites() const { return sites_; }

 private:
  struct KdNode {
    int site = -1;
    int axis = 0;
    int left = -1, right = -1;
  };

  int build(std::vector<int>& idx, int lo, int hi, int depth);
  void nn(int node, const Point& q, double* best_d2, int* best_site,
          std::int64_t* ops) const;

  std::vector<Point> sites_;
  std::vector<KdNode> kd_;
  int kd_root_ = -1;
};

// Closed-rectangle point counting over a 2-D set.  Query points live in R^4:
// (x1, x2, y1, y2) means the rectangle [x1,x2] x [y1,y2].  Backup is a merge
// sort tree (layered range tree), O(log^2 n) per query.
class RectCount {
 public:
  explicit RectCount(std::vector<Point> points);

  BackupAnswer backup(const Point& q4) const;
  Answer scan(const Point& q4) const;
  std::optional<Answer> interference(const BoxRegion& box) const;

  Answer count_rect(double x1, double x2, double y1, double y2,
                    std::int64_t* ops) const;

  const std::vector<Point>& points() const { return points_; }

 private:
  std::vector<Point> points_;      // sorted by (x, y)
  std::vector<double> xs_;         // x-coordinates of points_
  std::vector<std::vector<double>> ys_;  // segment tree of sorted y arrays
  size_t leaves_ = 0;
};

}  // namespace oddson
