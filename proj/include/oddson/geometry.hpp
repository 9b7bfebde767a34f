#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace oddson {

// A query point; dimension 2 for the planar apps, 4 for the rectangle-query
// space.
using Point = std::vector<double>;

inline Point pt(double x, double y) { return {x, y}; }

constexpr double kOrientEps = 1e-12;
constexpr double kContainTol = 1e-9;
// All construction happens inside the working box [-kWorkingBoxHalf,
// kWorkingBoxHalf]^d; queries outside it fall through to the backup oracle.
constexpr double kWorkingBoxHalf = 1e6;

enum class Orient { Left, Right, Collinear };

Orient orientation(const Point& a, const Point& b, const Point& c);

enum class SegMode { Strict, Closed };

// Does segment u-w intersect segment x-y?  Strict mode evaluates the two
// all-left / all-right conjunctions only (proper crossings); Closed mode also
// reports touching and collinear-overlap configurations.  Degenerate segments
// are rejected in Strict mode.
bool segments_intersect(const Point& u, const Point& w, const Point& x,
                        const Point& y, SegMode mode);

// Closed halfplane {p : nx*px + ny*py <= c}.  Stored with |n| = 1 so eval()
// is a signed distance.
struct HalfPlane {
  double nx = 0, ny = 0, c = 0;

  HalfPlane() = default;
  HalfPlane(double nx_, double ny_, double c_);

  double eval(const Point& p) const { return nx * p[0] + ny * p[1] - c; }
  bool contains(const Point& p, double tol = kContainTol) const {
    return eval(p) <= tol;
  }
  // Line through a and b keeping the left (CCW-interior) side.
  static HalfPlane left_of(const Point& a, const Point& b);
};

// Intersection of closed halfplanes.  Vertex cache is rebuilt on every
// construction/clip; for bounded regions the cached vertices are the corners
// in CCW order.
class ConvexRegion {
 public:
  ConvexRegion() = default;  // whole plane
  explicit ConvexRegion(std::vector<HalfPlane> constraints);

  static ConvexRegion box(double x0, double y0, double x1, double y1);
  static ConvexRegion working_box();
  // Builds the region bounded by a CCW vertex cycle.
  static ConvexRegion from_ccw_vertices(const std::vector<Point>& vs);

  ConvexRegion clipped(const HalfPlane& h) const;
  ConvexRegion intersect(const ConvexRegion& o) const;

  bool contains(const Point& p) const;
  bool empty() const { return empty_; }
  bool bounded() const;

  const std::vector<HalfPlane>& constraints() const { return constraints_; }
  const std::vector<Point>& vertices() const { return vertices_; }

  double area() const;
  Point anchor() const;  // mean of cached vertices

  // Fan triangulation from the lexicographically smallest vertex.  Throws
  // std::invalid_argument for unbounded or degenerate regions.
  std::vector<std::array<Point, 3>> triangulate() const;

 private:
  void rebuild_cache();

  std::vector<HalfPlane> constraints_;
  std::vector<Point> vertices_;
  bool empty_ = false;
};

double triangle_area(const Point& a, const Point& b, const Point& c);

// Uniform sample from a bounded region (area-weighted triangle pick +
// barycentric coordinates).
Point sample_point(const ConvexRegion& region, std::mt19937_64& rng);

// Axis-aligned box in R^dim; coordinates may be +-infinity.
class BoxRegion {
 public:
  BoxRegion() = default;
  BoxRegion(std::vector<double> lo, std::vector<double> hi);

  static BoxRegion cube(int dim, double half);
  // One-sided slab {p : p[axis] <= t} (or >= t), unbounded on other axes.
  static BoxRegion half(int dim, int axis, bool upper, double t);

  int dim() const { return static_cast<int>(lo_.size()); }
  bool empty() const;
  bool contains(const Point& p) const;  // closed
  BoxRegion intersect(const BoxRegion& o) const;

  const std::vector<double>& lo() const { return lo_; }
  const std::vector<double>& hi() const { return hi_; }

 private:
  std::vector<double> lo_, hi_;
};

// Shortest decimal string that round-trips the double exactly.
std::string fmt_double(double v);
double parse_double(const std::string& s);

}  // namespace oddson
