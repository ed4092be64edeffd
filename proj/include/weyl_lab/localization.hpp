#pragma once

#include <cstdint>
#include <vector>

#include "weyl_lab/brown.hpp"
#include "weyl_lab/geometry.hpp"
#include "weyl_lab/spectral.hpp"

// Sliding localization: a radial bump rescaled to a position-dependent length
// l(u) = max(dist(u, complement), 2 l0)/2, with a Jacobian factor that makes
// the family resolve the identity, int phi_u(x)^2 l(u)^{-2} du = 1 for all x.
namespace weyl_lab::localization {

// radial profile c exp(-1/(1-t^2)) on [0,1), scaled to unit L2 norm over the
// plane; the constant is frozen to 12 digits and cross-checked by quadrature
struct BumpProfile {
  double normalization = 0;

  double value(double t) const;       // 0 for t >= 1
  double derivative(double t) const;  // d/dt, 0 for t >= 1
  double sup() const { return value(0); }
};

BumpProfile default_bump();

struct LengthScale {
  const geometry::Domain* domain = nullptr;
  double l0 = 0;
};

LengthScale make_length_scale(const geometry::Domain& d, double l0);

double length_scale(const LengthScale& ls, geometry::Vec2 u);

struct ScaleGradient {
  geometry::Vec2 grad;
  bool one_sided = false;  // u on the medial axis, switch surface, or boundary
};

// gradient of l; one-sided (and flagged) on the measure-zero kink sets
ScaleGradient length_scale_gradient(const LengthScale& ls, geometry::Vec2 u);

// phi_u(x) = phi(|x-u|/l(u)) sqrt(1 + grad l(u).(x-u)/l(u))
double bump_value(const BumpProfile& bp, const LengthScale& ls, geometry::Vec2 u,
                  geometry::Vec2 x);

// |int phi_u(x)^2 l(u)^{-2} du - 1| by adaptive panel quadrature over the ball
// of radius 2 sup l around x; each extra depth level splits flagged panels
double partition_residual(const BumpProfile& bp, const LengthScale& ls, geometry::Vec2 x,
                          int depth = 4);

enum class RegionLabel { bulk, good, bad, exterior };

// bulk: the support ball stays inside; good/bad: u within l0 of the boundary,
// split by membership in the covered region of the good set
RegionLabel classify(const geometry::Domain& d, geometry::Vec2 u, const brown::GoodSet& gs,
                     double l0);

struct RegionVolumes {
  double bulk = 0, good = 0, bad = 0;
  double se_bulk = 0, se_good = 0, se_bad = 0;
  double collar_union = 0;  // good + bad as one indicator
  double se_union = 0;
  double collar_exact = 0;  // two-sided shell volume from the geometry
  double bound = 0;         // 2 l0 P (1 + theta_bar(l0))
  std::int64_t samples = 0;
  bool collar_match = false;  // |collar_union - collar_exact| <= 4 se_union
  bool within_bound = false;  // collar_union <= bound + 4 se_union
};

RegionVolumes region_volumes(const geometry::Domain& d, const brown::GoodSet& gs, double l0,
                             std::int64_t samples, std::uint64_t seed, int threads = 1);

struct DefectReport {
  double h = 0;
  double l0 = 0;
  double trace_full = 0;       // Tr(h^2 A - 1)_- over the whole grid
  double trace_localized = 0;  // quadrature of Tr(phi_u . phi_u)_- l(u)^{-2}
  double defect = 0;
  double reference = 0;  // int_{bulk+collar} l(u)^{-2} du (d = 2 scaling)
  double fitted_c = 0;   // defect / reference
  int nodes = 0;         // quadrature nodes with a nonzero trace
  bool complete = true;  // false when some node failed certification
};

// compares the grid trace with its localized average over tensor quadrature
// nodes; eps0 sets l0 = h/eps0; n is the grid resolution (needs h >= 8 h_grid)
DefectReport localization_defect(const geometry::Domain& d, double h, double eps0, int n,
                                 int nodes_per_axis = 14,
                                 const spectral::EigenOptions& opt = {});

struct TorusDefect {
  double lhs = 0;  // exact periodic trace
  double rhs = 0;  // localized value, one trace by translation invariance
  double defect = 0;
  int support = 0;
};

// boundary-free control: the same comparison on a unit torus with constant l,
// where the u-average collapses to a single localized trace
TorusDefect translation_invariant_defect(int cells, double l, double h,
                                         const spectral::EigenOptions& opt = {});

}  // namespace weyl_lab::localization
