#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace weyl_lab::geometry {

// thrown by Domain::parse; column is 1-based within the record
struct ParseError : std::invalid_argument {
  ParseError(const std::string& msg, int col);
  int column = 0;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::sqrt(norm2(a)); }
inline Vec2 normalized(Vec2 a) {
  double n = norm(a);
  return {a.x / n, a.y / n};
}
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }  // +90 degrees

enum class DomainKind { rectangle, convex_polygon, disk };
enum class Side { inner, outer };

struct BBox {
  Vec2 lo, hi;
  double width() const { return hi.x - lo.x; }
  double height() const { return hi.y - lo.y; }
  double max_side() const { return std::max(width(), height()); }
  double area() const { return width() * height(); }
  BBox expanded(double m) const { return {{lo.x - m, lo.y - m}, {hi.x + m, hi.y + m}}; }
};

struct GeometrySummary {
  double area = 0;
  double perimeter = 0;
  double inradius = 0;
  Vec2 incenter;  // a Chebyshev center (may be non-unique)
  BBox bbox;
  int vertex_count = 0;  // 0 for disks
};

struct ThetaReport {
  double t = 0;
  double shell_inner = 0;  // |{u in Omega : dist(u, boundary) < t}|
  double shell_outer = 0;  // |{u outside : dist(u, boundary) < t}|
  double theta_inner = 0;  // shell_inner/(t P) - 1
  double theta_outer = 0;
  double theta_bar = 0;  // (1/2) sup_{t' <= t} |theta_inner| + sup |theta_outer|, halved
};

struct MonteCarloEstimate {
  double value = 0;
  double std_error = 0;
  std::int64_t samples = 0;
};

// Nearest boundary feature of a query point.
struct BoundaryProjection {
  Vec2 point;          // closest point on the boundary
  Vec2 inward_normal;  // unit inward normal at that point (vertex: from point toward query, signed)
  double dist = 0;     // unsigned distance to the boundary
  int edge = -1;       // edge index when the projection hits an edge interior
  int vertex = -1;     // vertex index when it hits a vertex
  double s = 0;        // arclength parameter along the edge
  double feature_gap = 0;  // distance slack to the second-closest feature
};

struct ConvexBoundsRow {
  double t = 0;
  double offset_perimeter = 0;
  double lower = 0;  // P (1 - t/r_in)^{d-1}
  double upper = 0;  // P
  bool ok = false;
};

struct ConvexBoundsReport {
  double area = 0, perimeter = 0, inradius = 0;
  double inradius_lower = 0;  // |Omega| / P
  double inradius_upper = 0;  // d |Omega| / P
  bool inradius_ok = false;
  std::vector<ConvexBoundsRow> rows;
  bool all_ok = false;
};

class Domain {
 public:
  static Domain rectangle(double a, double b);
  static Domain convex_polygon(std::vector<Vec2> vertices);
  static Domain disk(double radius);

  // text records: "rect a b" | "poly x1 y1 x2 y2 ..." | "disk r"
  static Domain parse(std::string_view text);
  std::string serialize() const;

  DomainKind kind() const { return kind_; }
  const std::vector<Vec2>& vertices() const { return verts_; }  // empty for disk
  double disk_radius() const { return radius_; }
  double rect_width() const { return rect_a_; }
  double rect_height() const { return rect_b_; }

  double area() const { return area_; }
  double perimeter() const { return perimeter_; }
  BBox bbox() const { return bbox_; }

  // positive inside, negative outside, zero on the boundary
  double signed_distance(Vec2 p) const;
  bool contains(Vec2 p) const { return signed_distance(p) > 0; }
  BoundaryProjection project_boundary(Vec2 p) const;

  GeometrySummary summary() const;

  // inner parallel set {u : dist(u, complement) > t}; polygons/rectangles only
  Domain inner_parallel_set(double t) const;

  // exact measure of the one-sided boundary shell of depth t (0 < t <= inradius)
  double shell_volume(double t, Side side) const;
  MonteCarloEstimate shell_volume_mc(double t, Side side, std::uint64_t seed,
                                     std::int64_t samples, int threads = 1) const;

  ThetaReport theta(double t) const;
  ConvexBoundsReport check_convex_bounds(const std::vector<double>& ts) const;

  // edge data (polygons and rectangles)
  const std::vector<Vec2>& edge_normals() const { return edge_normals_; }
  const std::vector<double>& edge_offsets() const { return edge_offsets_; }
  const std::vector<double>& edge_lengths() const { return edge_lengths_; }

 private:
  Domain() = default;
  void finish_polygon(bool validate);
  double chebyshev_inradius(Vec2* center) const;

  DomainKind kind_ = DomainKind::rectangle;
  std::vector<Vec2> verts_;          // CCW, also populated for rectangles
  std::vector<Vec2> edge_normals_;   // unit inward normals per edge
  std::vector<double> edge_offsets_; // n_i . x = c_i on edge i, inside has n_i . x > c_i
  std::vector<double> edge_lengths_;
  double radius_ = 0;
  double rect_a_ = 0, rect_b_ = 0;
  double area_ = 0, perimeter_ = 0;
  double inradius_ = -1;
  Vec2 incenter_;
  BBox bbox_;
};

// uniform points-per-decade geometric grid on [t_min, t_max]
std::vector<double> geometric_grid(double t_min, double t_max, int per_decade);

// convex hull (strictly convex, CCW) of a point cloud; collinear points dropped
std::vector<Vec2> convex_hull(std::vector<Vec2> pts);

// seeded random convex polygon: hull of `npts` uniform points in the unit square
Domain random_convex_polygon(std::uint64_t seed, int npts);

}  // namespace weyl_lab::geometry
