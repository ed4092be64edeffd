#pragma once

#include <weyl_lab/geometry.hpp>

#include <vector>

namespace weyl_lab::weyl {

// Phase-space constants for Riesz means of the Dirichlet Laplacian in
// dimension d: the unit-ball volume omega_d and the semiclassical
// coefficient L_d multiplying |Omega| lambda^{1+d/2}.
struct WeylConstants {
  int dim = 0;
  double ball_volume = 0;  // omega_d = pi^{d/2} / Gamma(1 + d/2)
  double riesz1 = 0;       // L_d = (2/(2+d)) omega_d / (2 pi)^d

  // order-gamma coefficient Gamma(gamma+1) / ((4 pi)^{d/2} Gamma(gamma+1+d/2));
  // gamma = 1 reproduces riesz1
  double riesz_gamma(double gamma) const;
};

WeylConstants constants(int dim);

// W2(lambda) = L_2 |Omega| lambda^2 - (L_1/4) P lambda^{3/2}
double two_term_riesz(const geometry::GeometrySummary& s, double lambda);

struct RemainderPoint {
  double lambda = 0;
  double riesz = 0;       // first-order Riesz mean of the supplied spectrum
  double prediction = 0;  // one- or two-term model value
  double remainder = 0;   // riesz - prediction
  double normalized = 0;  // |remainder| / lambda^{3/2}
};

struct DecadeStat {
  double lo = 0, hi = 0;  // decade [lo, hi)
  double median = 0;      // median of the per-point statistic
  double max = 0;
  int count = 0;
};

struct RemainderSeries {
  std::vector<RemainderPoint> points;
  std::vector<DecadeStat> decades;  // statistics of |R|/lambda^{3/2} per decade
  double slope = 0;                 // log|R| vs log lambda fit, top two decades
};

// Evaluates the remainder of the two-term model (terms = 2) or of the bulk
// term alone (terms = 1) on a strictly increasing grid with max <= cutoff.
RemainderSeries remainder_series(const std::vector<double>& ev, double cutoff,
                                 const geometry::GeometrySummary& s,
                                 const std::vector<double>& grid, int terms = 2);

// Log-uniform targets in [lo, hi] snapped to midpoints of the containing
// eigenvalue gaps, where the Riesz mean is smooth; deduplicated, increasing.
std::vector<double> midpoint_log_grid(const std::vector<double>& ev, double lo, double hi,
                                      int per_decade);

struct AizenmanLiebCheck {
  double lambda = 0;
  double direct = 0;      // Riesz mean of order gamma2 summed directly
  double integrated = 0;  // Beta-weighted integral of the order-gamma1 mean
  double residual = 0;    // |direct - integrated|
};

// Order-raising identity between Riesz means, evaluated by exact piecewise
// integration of the lower-order mean. Supported pairs: (0,1) and (1,2).
AizenmanLiebCheck check_aizenman_lieb(const std::vector<double>& ev, double cutoff,
                                      double lambda, int gamma1 = 0, int gamma2 = 1);

struct ConvexBoundRow {
  double lambda = 0;
  double remainder = 0;
  double q = 0;  // |R| / (P lambda^{3/2} (r_in sqrt(lambda))^{-1/11})
};

struct ConvexBoundReport {
  std::vector<ConvexBoundRow> rows;
  std::vector<DecadeStat> decades;  // per-decade statistics of q
  double fitted_c = 0;              // sup q over the grid
  double decade_ratio = 0;          // max over decades of (decade max / first decade max)
  bool bounded = false;             // decade_ratio <= 1.5
};

// Tests the scale-invariant bound |R(lambda)| <= C P lambda^{3/2}
// (r_in sqrt(lambda))^{-1/11} for convex domains: the unknown C is fitted
// (sup q) and boundedness across decades is asserted instead.
ConvexBoundReport check_universal_convex_bound(const std::vector<double>& ev, double cutoff,
                                               const geometry::GeometrySummary& s,
                                               const std::vector<double>& grid);

}  // namespace weyl_lab::weyl
