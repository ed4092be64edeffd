#include "weyl_lab/cone.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <stdexcept>
#include <thread>
#include <vector>

#include <Eigen/SparseCore>

#include "weyl_lab/quadrature.hpp"
#include "weyl_lab/weyl.hpp"

namespace weyl_lab::cone {

namespace {

constexpr double kPi = 3.14159265358979323846;

// intersection of the ray r >= 0 in direction dir with the support disk
struct RaySpan {
  double lo = 0, hi = 0;
  bool empty = true;
};

RaySpan ray_disk(geometry::Vec2 dir, geometry::Vec2 c, double l) {
  double b = dir.x * c.x + dir.y * c.y;
  double disc = b * b - (c.x * c.x + c.y * c.y - l * l);
  if (disc <= 0) return {};
  double root = std::sqrt(disc);
  double lo = std::max(b - root, 0.0);
  double hi = b + root;
  if (hi <= lo) return {};
  return {lo, hi, false};
}

// int_ta^tb int r phi^2(r cos t, r sin t) dr dt; the radial span ends at the
// shave radius, so the weight's only discontinuity sits on an interval
// endpoint and both quadrature levels see smooth integrands
double sector_mass(const ConeWeight& w, double ta, double tb, double tol) {
  double inner_tol = 0.25 * tol / (tb - ta);
  auto wedge = [&](double t) {
    geometry::Vec2 dir{std::cos(t), std::sin(t)};
    auto span = ray_disk(dir, w.center, w.cut * w.l);
    if (span.empty) return 0.0;
    auto f = [&](double r) {
      double v = w.value({r * dir.x, r * dir.y});
      return r * v * v;
    };
    return quadrature::adaptive_simpson(f, span.lo, span.hi, inner_tol);
  };
  return quadrature::adaptive_simpson(wedge, ta, tb, tol);
}

double ray_mass(const ConeWeight& w, geometry::Vec2 dir, double tol) {
  auto span = ray_disk(dir, w.center, w.cut * w.l);
  if (span.empty) return 0.0;
  auto f = [&](double r) {
    double v = w.value({r * dir.x, r * dir.y});
    return v * v;
  };
  return quadrature::adaptive_simpson(f, span.lo, span.hi, tol);
}

}  // namespace

ConeDomain make_cone(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 0.5))
    throw std::invalid_argument("opening parameter must lie in [0, 1/2]");
  return {epsilon};
}

bool cone_membership(const ConeDomain& cd, geometry::Vec2 x) {
  return x.y < cd.epsilon * std::hypot(x.x, x.y);
}

bool side_membership(const ConeDomain& cd, Side side, geometry::Vec2 x) {
  if (side == Side::cone) return cone_membership(cd, x);
  return x.y > cd.epsilon * std::hypot(x.x, x.y);
}

double ConeWeight::value(geometry::Vec2 x) const {
  double t = geometry::norm(x - center) / l;
  if (t > cut) return 0;
  return profile.value(t);
}

ConeWeight make_weight(geometry::Vec2 center, double l) {
  if (!(l > 0) || !std::isfinite(l))
    throw std::invalid_argument("weight radius must be positive");
  // profile value tau * sup at 1/(1-t^2) = 1 + log(1/tau); tau = 1e-2
  double cut = std::sqrt(1.0 - 1.0 / (1.0 + std::log(100.0)));
  return {localization::default_bump(), center, l, cut};
}

TwoTermPrediction cone_two_term_prediction(const ConeDomain& cd, const ConeWeight& w,
                                           double h, Side side) {
  if (!(h > 0) || !std::isfinite(h)) throw std::invalid_argument("h must be positive");
  if (!(w.l > 0)) throw std::invalid_argument("weight radius must be positive");

  double a = std::asin(cd.epsilon);
  double ta = side == Side::cone ? kPi - a : a;
  double tb = side == Side::cone ? 2.0 * kPi + a : kPi - a;

  TwoTermPrediction p;
  p.volume_integral = sector_mass(w, ta, tb, 1e-8 * w.l * w.l);
  geometry::Vec2 right{std::cos(a), std::sin(a)};
  geometry::Vec2 left{-right.x, right.y};
  p.boundary_integral =
      ray_mass(w, right, 5e-9 * w.l) + ray_mass(w, left, 5e-9 * w.l);

  double l2 = weyl::constants(2).riesz1;
  double l1 = weyl::constants(1).riesz1;
  p.value = l2 / (h * h) * p.volume_integral - 0.25 * l1 / h * p.boundary_integral;
  return p;
}

ConeGrid cone_grid(const ConeDomain& cd, Side side, const ConeWeight& w, double s) {
  if (!(s > 0) || !std::isfinite(s)) throw std::invalid_argument("spacing must be positive");
  if (!(w.l > 0)) throw std::invalid_argument("weight radius must be positive");

  double reach = w.l + 2.0 * s;
  auto lo_index = [&](double c) { return static_cast<std::int64_t>(std::ceil((c - reach) / s - 1e-12)); };
  auto hi_index = [&](double c) { return static_cast<std::int64_t>(std::floor((c + reach) / s + 1e-12)); };
  std::int64_t i0 = lo_index(w.center.x), i1 = hi_index(w.center.x);
  std::int64_t j0 = lo_index(w.center.y), j1 = hi_index(w.center.y);
  std::int64_t wi = i1 - i0 + 1, wj = j1 - j0 + 1;
  if (wi <= 0 || wj <= 0) return {s, {}, spectral::SpMat(0, 0)};
  if (wi * wj > 30'000'000) throw std::length_error("grid too large for the support box");

  std::vector<std::int32_t> id(static_cast<std::size_t>(wi * wj), -1);
  auto slot = [&](std::int64_t i, std::int64_t j) {
    return static_cast<std::size_t>((j - j0) * wi + (i - i0));
  };

  ConeGrid g;
  g.s = s;
  std::int32_t count = 0;
  for (std::int64_t j = j0; j <= j1; ++j)
    for (std::int64_t i = i0; i <= i1; ++i) {
      geometry::Vec2 x{static_cast<double>(i) * s, static_cast<double>(j) * s};
      if (!side_membership(cd, side, x)) continue;
      id[slot(i, j)] = count++;
      g.nodes.push_back(x);
    }

  double inv2 = 1.0 / (s * s);
  std::vector<Eigen::Triplet<double>> ts;
  ts.reserve(static_cast<std::size_t>(count) * 5);
  for (std::int64_t j = j0; j <= j1; ++j)
    for (std::int64_t i = i0; i <= i1; ++i) {
      std::int32_t me = id[slot(i, j)];
      if (me < 0) continue;
      ts.emplace_back(me, me, 4.0 * inv2);
      const std::int64_t di[4] = {1, -1, 0, 0};
      const std::int64_t dj[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        std::int64_t ni = i + di[k], nj = j + dj[k];
        if (ni < i0 || ni > i1 || nj < j0 || nj > j1) continue;
        std::int32_t other = id[slot(ni, nj)];
        if (other >= 0) ts.emplace_back(me, other, -inv2);
      }
    }
  g.laplacian.resize(count, count);
  g.laplacian.setFromTriplets(ts.begin(), ts.end());
  return g;
}

double localized_cone_trace(const ConeDomain& cd, Side side, const ConeWeight& w, double h,
                            double s, const spectral::EigenOptions& opt) {
  if (!(h > 0) || !std::isfinite(h)) throw std::invalid_argument("h must be positive");
  if (!(s <= 0.5 * h)) throw std::invalid_argument("grid too coarse: need s <= h/2");

  ConeGrid g = cone_grid(cd, side, w, s);
  if (g.nodes.empty()) return 0.0;
  std::vector<double> phi(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) phi[i] = w.value(g.nodes[i]);
  return h * h * spectral::localized_trace_negative(g.laplacian, phi, 1.0 / (h * h), opt);
}

ConeTraceReport cone_trace_experiment(const ConeExperiment& exp) {
  if (!(exp.weight.l > 0)) throw std::invalid_argument("weight radius must be positive");
  if (!(exp.spacing_ratio >= 8.0 * (1.0 - 1e-12)))
    throw std::invalid_argument("spacing ratio must be at least 8");
  if (exp.hs.empty()) throw std::invalid_argument("the h list must not be empty");
  for (double h : exp.hs) {
    if (!(h > 0) || !std::isfinite(h)) throw std::invalid_argument("h must be positive");
    if (!(h <= exp.weight.l * (1.0 + 1e-12)))
      throw std::invalid_argument("h must not exceed the support radius");
  }

  // one job per (h, spacing): each rung measures on its own fine grid
  // s = h / ratio and reruns at 2h / ratio; the difference bounds the
  // discretization error at a cost that scales with the rung
  std::size_t jobs = 2 * exp.hs.size();
  std::vector<double> traces(jobs, 0.0);
  std::vector<std::exception_ptr> failures(jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t k = next.fetch_add(1);
      if (k >= jobs) return;
      double h = exp.hs[k / 2];
      double s = (k % 2 == 0 ? h : 2.0 * h) / exp.spacing_ratio;
      try {
        traces[k] = localized_cone_trace(exp.cone, exp.side, exp.weight, h, s, exp.eigen);
      } catch (...) {
        failures[k] = std::current_exception();
      }
    }
  };
  int nt = std::clamp(exp.threads, 1, static_cast<int>(jobs));
  if (nt <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);

  ConeTraceReport rep;
  rep.epsilon = exp.cone.epsilon;
  rep.side = exp.side;
  rep.l = exp.weight.l;
  for (std::size_t i = 0; i < exp.hs.size(); ++i) {
    ConeTraceRow row;
    row.h = exp.hs[i];
    row.s = exp.hs[i] / exp.spacing_ratio;
    row.measured = traces[2 * i];
    row.coarse = traces[2 * i + 1];
    row.predicted = cone_two_term_prediction(exp.cone, exp.weight, row.h, exp.side).value;
    row.remainder = row.measured - row.predicted;
    row.normalized = std::abs(row.remainder) / std::pow(exp.weight.l / row.h, 2.0 / 3.0);
    row.contamination = std::abs(row.measured - row.coarse);
    row.unreliable = row.contamination > 0.2 * std::abs(row.remainder);
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace weyl_lab::cone
