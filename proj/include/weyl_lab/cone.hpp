#pragma once

#include <vector>

#include "weyl_lab/geometry.hpp"
#include "weyl_lab/localization.hpp"
#include "weyl_lab/spectral.hpp"

// Model cone Lambda_eps = {x in R^2 : x_2 < eps|x|} and its convex
// complement sector. For a fixed bump weight phi of radius l the localized
// trace Tr(phi(-h^2 Lap - 1)phi)_- follows the two-term law
//   L_2 h^{-2} int phi^2 - (L_1/4) h^{-1} int_rays phi^2 + O((l/h)^{2/3})
// uniformly in the opening parameter, and the experiment below measures the
// remainder against that envelope on an h-ladder.
namespace weyl_lab::cone {

struct ConeDomain {
  double epsilon = 0;  // in [0, 1/2]; 0 is the lower half-plane
};

ConeDomain make_cone(double epsilon);

enum class Side { cone, complement };

// strict inequality x_2 < eps|x|: the vertex and the rays belong to neither
// side, so grid masks treat them as Dirichlet nodes
bool cone_membership(const ConeDomain& cd, geometry::Vec2 x);
bool side_membership(const ConeDomain& cd, Side side, geometry::Vec2 x);

// radial bump of radius l (no Jacobian factor; l is constant here), shaved
// to zero where the profile falls below 1e-2 of its peak (|x - center| >
// cut * l). The shave drops 4.9e-6 of the squared mass but keeps the
// smallest nonzero weight at 1e-2 of the peak, so the eigenvalues of the
// sandwiched operator stay resolvable in double precision. Trace and
// prediction both integrate the shaved weight, so the two-term comparison
// is unaffected beyond that 5e-6 relative perturbation.
struct ConeWeight {
  localization::BumpProfile profile;
  geometry::Vec2 center;
  double l = 0;
  double cut = 1;  // shave radius as a fraction of l

  double value(geometry::Vec2 x) const;
};

ConeWeight make_weight(geometry::Vec2 center, double l);

struct TwoTermPrediction {
  double volume_integral = 0;    // int_side phi^2 dx
  double boundary_integral = 0;  // int of phi^2 over the two rays
  double value = 0;              // L_2 h^{-2} vol - (L_1/4) h^{-1} bdry
};

// both integrals by nested adaptive quadrature in polar coordinates around
// the vertex, where the only edges are interval endpoints; relative
// quadrature error <= 1e-6 of the weight's total mass l^2
TwoTermPrediction cone_two_term_prediction(const ConeDomain& cd, const ConeWeight& w,
                                           double h, Side side = Side::cone);

// masked five-point grid anchored at the vertex: node (i,j) sits at s*(i,j),
// kept when strictly inside the chosen side and within the support box of
// the weight plus a 2s margin
struct ConeGrid {
  double s = 0;
  std::vector<geometry::Vec2> nodes;
  spectral::SpMat laplacian;
};

ConeGrid cone_grid(const ConeDomain& cd, Side side, const ConeWeight& w, double s);

// h^2 Tr(phi(K - 1/h^2)phi)_- on the masked grid with spacing s; the weight
// support must resolve, s <= h/2
double localized_cone_trace(const ConeDomain& cd, Side side, const ConeWeight& w, double h,
                            double s, const spectral::EigenOptions& opt = {});

struct ConeExperiment {
  ConeDomain cone;
  Side side = Side::cone;
  ConeWeight weight;
  std::vector<double> hs;      // each in (0, l]
  double spacing_ratio = 16;   // fine grid s = h / ratio; the error-control
                               // pass reruns at 2h / ratio; must be >= 8
  spectral::EigenOptions eigen;
  int threads = 1;
};

struct ConeTraceRow {
  double h = 0;
  double s = 0;  // fine grid spacing for this rung
  double measured = 0;       // fine-grid localized trace
  double coarse = 0;         // same trace at twice the spacing
  double predicted = 0;
  double remainder = 0;      // measured - predicted
  double normalized = 0;     // |remainder| / (l/h)^{2/3}
  double contamination = 0;  // |measured - coarse|, bounds the grid error
  bool unreliable = false;   // contamination > 0.2 |remainder|
};

struct ConeTraceReport {
  double epsilon = 0;
  Side side = Side::cone;
  double l = 0;
  std::vector<ConeTraceRow> rows;  // ordered as the h list
};

// independent eigensolves per (h, resolution), optionally threaded; rows are
// merged in the order of the experiment's h list
ConeTraceReport cone_trace_experiment(const ConeExperiment& exp);

}  // namespace weyl_lab::cone
