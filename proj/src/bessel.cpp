#include "weyl_lab/bessel.hpp"

#include <cmath>
#include <stdexcept>

namespace weyl_lab::bessel {

namespace {

double refine(int order, double a, double b, double fa) {
  // simple zeros only, so sign-change bisection is safe
  while (b - a > 1e-15 * b) {
    double m = 0.5 * (a + b);
    double fm = std::cyl_bessel_j(order, m);
    if (fm == 0) return m;
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// scan [start, stop] with a step below the minimal zero spacing, appending
// every zero found; returns the number appended
int scan(int order, double start, double stop, std::vector<double>& out) {
  constexpr double kStep = 1.0;
  int found = 0;
  double a = start;
  double fa = std::cyl_bessel_j(order, a);
  // underflowed high-order tail has no zeros; step past it
  while (fa == 0 && a < stop) {
    a += 0.25;
    fa = std::cyl_bessel_j(order, a);
  }
  while (a < stop) {
    double b = std::min(a + kStep, stop);
    double fb = std::cyl_bessel_j(order, b);
    if (fb == 0) {
      out.push_back(b);
      ++found;
      b += 1e-9 * (1 + b);
      fb = std::cyl_bessel_j(order, b);
    } else if ((fa > 0) != (fb > 0)) {
      out.push_back(refine(order, a, b, fa));
      ++found;
    }
    a = b;
    fa = fb;
  }
  return found;
}

// J_order has no zero below sqrt(order (order + 2))
double first_zero_floor(int order) {
  return std::max(0.5, std::sqrt(static_cast<double>(order) * (order + 2.0)) * 0.99);
}

}  // namespace

double j_zero(int order, int k) {
  if (order < 0 || k < 1) throw std::invalid_argument("need order >= 0 and k >= 1");
  std::vector<double> zs;
  double lo = first_zero_floor(order);
  double hi = lo + 32;
  while (static_cast<int>(zs.size()) < k) {
    scan(order, lo, hi, zs);
    lo = hi;
    hi += 32;
  }
  return zs[static_cast<std::size_t>(k - 1)];
}

std::vector<double> zeros_up_to(int order, double x) {
  std::vector<double> zs;
  if (order < 0) throw std::invalid_argument("need order >= 0");
  double lo = first_zero_floor(order);
  if (lo < x) scan(order, lo, x, zs);
  return zs;
}

std::vector<std::vector<double>> zero_table(double x) {
  std::vector<std::vector<double>> rows;
  for (int n = 0;; ++n) {
    auto zs = zeros_up_to(n, x);
    if (zs.empty()) break;
    rows.push_back(std::move(zs));
  }
  for (std::size_t n = 0; n + 1 < rows.size(); ++n) {
    const auto& a = rows[n];
    const auto& b = rows[n + 1];
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (!(a[k] < b[k])) throw std::logic_error("interlacing failed (lower)");
      if (k + 1 < a.size() && !(b[k] < a[k + 1]))
        throw std::logic_error("interlacing failed (upper)");
    }
  }
  return rows;
}

}  // namespace weyl_lab::bessel
