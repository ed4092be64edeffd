#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "weyl_lab/geometry.hpp"

// Good boundary points: p is (eps,r)-good when every other boundary point x
// within the open ball B_r(p) stays strictly inside the double cone
// |(x-p).nu(p)| < eps |x-p| around the tangent plane. Above each good point
// sits the normal cone window Gamma = {|(x-p).nu| > sqrt(1-eps^2)|x-p|} cut to
// B_{r/2}(p); their union is the covered region near the boundary.
namespace weyl_lab::brown {

struct GoodParams {
  double eps = 0;
  double r = 0;
};

struct BoundaryPoint {
  geometry::Vec2 point;
  geometry::Vec2 inward_normal;
  int edge = -1;   // polygon edge index
  double s = 0;    // arclength along that edge
};

// exact predicate; p must lie on an edge interior (polygons) or on the circle
bool is_good_point(const geometry::Domain& d, geometry::Vec2 p, const GoodParams& gp);

struct GoodSet {
  GoodParams params;
  // arclength spans of good points, one list per polygon edge
  std::vector<std::vector<std::pair<double, double>>> per_edge;
  bool disk_good = false;
  double good_length = 0;
  double total_length = 0;
  double mu() const { return 1.0 - good_length / total_length; }
};

// transitions located by bisection to 1e-12 * perimeter
GoodSet good_set(const geometry::Domain& d, const GoodParams& gp);

// uncovered boundary fraction
double mu(const geometry::Domain& d, const GoodParams& gp);

struct RegionWitness {
  bool covered = false;
  BoundaryPoint witness;
};

// is u inside some Gamma window of a good point; strict re-verifies with a
// dense boundary sweep at doubling resolution until stable twice
RegionWitness in_good_region(const geometry::Domain& d, geometry::Vec2 u,
                             const GoodSet& gs, bool strict = false);

struct BadShellReport {
  double s = 0;
  double estimate = 0;
  double std_error = 0;
  std::int64_t samples = 0;
  double mu_value = 0;
  double theta_bar = 0;
  double bound_general = 0;     // 2 s (mu + theta_bar(s) + eps^2) P
  double bound_convex_unit = 0; // P s r / (eps r_in), i.e. the convex-domain form with C = 1
  double ratio_convex = 0;      // estimate / bound_convex_unit
};

// Monte Carlo volume of {dist(.,boundary) < s} minus the covered region
BadShellReport bad_shell_volume(const geometry::Domain& d, const GoodParams& gp, double s,
                                std::uint64_t seed, std::int64_t samples, int threads = 1);

struct ProximityReport {
  std::int64_t samples = 0;
  std::int64_t violations_factor2 = 0;  // |u-p| <= 2 dist(u, boundary)
  std::int64_t violations_sharp = 0;    // dist(u, boundary) >= (1 - 2 eps^2) |u-p|
  double worst_factor = 0;              // max |u-p| / dist
  double worst_sharp = 0;               // min dist / |u-p|
};

// samples u from Gamma windows over random good points and checks that the
// window pins u near its apex: |u-p| <= 2 dist and dist >= (1-2 eps^2)|u-p|
ProximityReport check_vertex_proximity(const geometry::Domain& d, const GoodParams& gp,
                                       std::int64_t samples, std::uint64_t seed);

}  // namespace weyl_lab::brown
