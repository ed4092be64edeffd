#pragma once

#include <functional>
#include <vector>

namespace weyl_lab::quadrature {

struct GaussLegendre {
  std::vector<double> x;  // nodes on [-1,1]
  std::vector<double> w;
};

// cached Gauss-Legendre rule, n >= 1
const GaussLegendre& gauss_legendre(int n);

// adaptive Simpson with absolute tolerance
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 48);

// tensor GL over [ax,bx] x [ay,by] split into nx * ny panels
double panel_integrate_2d(const std::function<double(double, double)>& f, double ax,
                          double bx, double ay, double by, int nx, int ny, int order);

}  // namespace weyl_lab::quadrature
