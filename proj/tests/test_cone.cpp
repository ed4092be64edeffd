#include "weyl_lab/cone.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "doctest.h"
#include "weyl_lab/quadrature.hpp"
#include "weyl_lab/rng.hpp"
#include "weyl_lab/weyl.hpp"

using namespace weyl_lab;
using cone::Side;
using geometry::Vec2;

namespace {

constexpr double kPi = 3.14159265358979323846;
// integrals of the shaved unit-radius profile (zero beyond the 1e-2 cut):
// squared mass over the plane and the squared line integral from the center
constexpr double kMass = 0.9999950803819998;
constexpr double kLineMass = 0.5643185924484684;

double sector_fraction(double eps) { return (kPi + 2.0 * std::asin(eps)) / (2.0 * kPi); }

// independent volume oracle: iterated Cartesian quadrature with the side
// resolved exactly into the inner interval, split at the slope kink x = 0
double cartesian_side_mass(double eps, Side side, const cone::ConeWeight& w) {
  double m = eps / std::sqrt(1.0 - eps * eps);
  double rl = w.cut * w.l;
  auto strip = [&](double x) {
    double dx = x - w.center.x;
    double rad = rl * rl - dx * dx;
    if (rad <= 0) return 0.0;
    double half = std::sqrt(rad);
    double ylo = w.center.y - half, yhi = w.center.y + half;
    double cutv = m * std::abs(x);
    if (side == Side::cone)
      yhi = std::min(yhi, cutv);
    else
      ylo = std::max(ylo, cutv);
    if (yhi <= ylo) return 0.0;
    auto f = [&](double y) {
      double v = w.value({x, y});
      return v * v;
    };
    return quadrature::adaptive_simpson(f, ylo, yhi, 1e-10 * w.l);
  };
  double a = w.center.x - rl, b = w.center.x + rl;
  if (a < 0 && 0 < b)
    return quadrature::adaptive_simpson(strip, a, 0, 4e-9 * w.l * w.l) +
           quadrature::adaptive_simpson(strip, 0, b, 4e-9 * w.l * w.l);
  return quadrature::adaptive_simpson(strip, a, b, 8e-9 * w.l * w.l);
}

}  // namespace

TEST_CASE("cone membership follows the strict sector inequality") {
  auto half = cone::make_cone(0.0);
  CHECK(cone::cone_membership(half, {1.0, -0.1}));
  CHECK_FALSE(cone::cone_membership(half, {1.0, 0.0}));
  CHECK_FALSE(cone::cone_membership(half, {1.0, 0.1}));

  auto cd = cone::make_cone(0.5);
  CHECK(cone::cone_membership(cd, {1.0, 0.4}));
  CHECK_FALSE(cone::cone_membership(cd, {1.0, 0.6}));

  for (double eps : {0.0, 0.25, 0.5}) {
    auto c = cone::make_cone(eps);
    CHECK_FALSE(cone::cone_membership(c, {0.0, 0.0}));
    CHECK_FALSE(cone::side_membership(c, Side::complement, {0.0, 0.0}));
  }

  // the horizontal boundary of the half-plane belongs to neither side
  CHECK_FALSE(cone::side_membership(half, Side::cone, {1.0, 0.0}));
  CHECK_FALSE(cone::side_membership(half, Side::complement, {1.0, 0.0}));
  CHECK(cone::side_membership(half, Side::complement, {1.0, 0.1}));

  CHECK_THROWS_AS(cone::make_cone(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(cone::make_cone(0.51), std::invalid_argument);
  CHECK_THROWS_AS(cone::make_cone(std::nan("")), std::invalid_argument);
}

TEST_CASE("the complement sector is convex") {
  auto cd = cone::make_cone(0.5);
  int checked = 0;
  for (int i = 0; checked < 2000; ++i) {
    Vec2 a{rng::uniform(3, rng::streams::gradient_x, 2 * i, -2.0, 2.0),
           rng::uniform(3, rng::streams::gradient_y, 2 * i, -2.0, 2.0)};
    Vec2 b{rng::uniform(3, rng::streams::gradient_x, 2 * i + 1, -2.0, 2.0),
           rng::uniform(3, rng::streams::gradient_y, 2 * i + 1, -2.0, 2.0)};
    if (!cone::side_membership(cd, Side::complement, a)) continue;
    if (!cone::side_membership(cd, Side::complement, b)) continue;
    Vec2 mid{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    CHECK(mid.y >= 0.5 * std::hypot(mid.x, mid.y) - 1e-12);
    ++checked;
  }
  CHECK(checked == 2000);
}

TEST_CASE("two-term prediction matches the vertex-centered closed forms") {
  auto w = cone::make_weight({0.0, 0.0}, 1.0);
  for (double eps : {0.0, 0.1, 0.3, 0.5}) {
    auto cd = cone::make_cone(eps);
    auto p = cone::cone_two_term_prediction(cd, w, 0.25);
    CHECK(p.volume_integral == doctest::Approx(sector_fraction(eps) * kMass).epsilon(1e-7));
    CHECK(p.boundary_integral == doctest::Approx(2.0 * kLineMass).epsilon(1e-7));
    auto pc = cone::cone_two_term_prediction(cd, w, 0.25, Side::complement);
    CHECK(pc.volume_integral ==
          doctest::Approx((1.0 - sector_fraction(eps)) * kMass).epsilon(1e-7));
    CHECK(pc.boundary_integral == doctest::Approx(2.0 * kLineMass).epsilon(1e-7));
  }

  // scaling the radius scales volume by l^2 and the ray integral by l
  auto w7 = cone::make_weight({0.0, 0.0}, 0.7);
  auto p7 = cone::cone_two_term_prediction(cone::make_cone(0.5), w7, 0.25);
  CHECK(p7.volume_integral ==
        doctest::Approx(0.49 * sector_fraction(0.5) * kMass).epsilon(1e-7));
  CHECK(p7.boundary_integral == doctest::Approx(1.4 * kLineMass).epsilon(1e-7));
}

TEST_CASE("half-plane prediction with the weight on the boundary") {
  auto cd = cone::make_cone(0.0);
  auto w = cone::make_weight({0.3, 0.0}, 1.0);
  auto p = cone::cone_two_term_prediction(cd, w, 0.125);
  CHECK(p.volume_integral == doctest::Approx(0.5 * kMass).epsilon(1e-8));
  CHECK(p.boundary_integral == doctest::Approx(2.0 * kLineMass).epsilon(1e-8));

  double l2 = weyl::constants(2).riesz1;
  double l1 = weyl::constants(1).riesz1;
  double expected = l2 * 64.0 * p.volume_integral - 0.25 * l1 * 8.0 * p.boundary_integral;
  CHECK(p.value == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("prediction volume agrees with an independent Cartesian quadrature") {
  struct Case {
    double eps;
    Side side;
    Vec2 center;
    double l;
  };
  const Case cases[] = {
      {0.3, Side::cone, {0.31, 0.17}, 1.0},
      {0.3, Side::complement, {0.31, 0.17}, 1.0},
      {0.5, Side::cone, {-0.42, 0.35}, 0.8},
      {0.07, Side::complement, {0.1, 0.55}, 0.6},
  };
  for (const auto& c : cases) {
    auto cd = cone::make_cone(c.eps);
    auto w = cone::make_weight(c.center, c.l);
    auto p = cone::cone_two_term_prediction(cd, w, 1.0, c.side);
    double oracle = cartesian_side_mass(c.eps, c.side, w);
    CHECK(p.volume_integral == doctest::Approx(oracle).epsilon(5e-6));
  }

  // the two sides partition the shaved mass up to the null boundary
  auto cd = cone::make_cone(0.37);
  auto w = cone::make_weight({0.23, 0.11}, 0.9);
  auto pa = cone::cone_two_term_prediction(cd, w, 1.0, Side::cone);
  auto pb = cone::cone_two_term_prediction(cd, w, 1.0, Side::complement);
  CHECK(pa.volume_integral + pb.volume_integral ==
        doctest::Approx(0.81 * kMass).epsilon(1e-7));
}

TEST_CASE("prediction is h-homogeneous with the two-term powers") {
  auto cd = cone::make_cone(0.5);
  auto w = cone::make_weight({0.0, 0.0}, 1.0);
  auto p1 = cone::cone_two_term_prediction(cd, w, 0.1);
  auto p2 = cone::cone_two_term_prediction(cd, w, 0.2);
  CHECK(p2.volume_integral == p1.volume_integral);
  CHECK(p2.boundary_integral == p1.boundary_integral);

  double l2 = weyl::constants(2).riesz1;
  double l1 = weyl::constants(1).riesz1;
  double bulk = l2 / 0.01 * p1.volume_integral;
  double surf = 0.25 * l1 / 0.1 * p1.boundary_integral;
  CHECK(p1.value == doctest::Approx(bulk - surf).epsilon(1e-12));
  CHECK(p2.value == doctest::Approx(bulk / 4.0 - surf / 2.0).epsilon(1e-12));

  CHECK_THROWS_AS(cone::cone_two_term_prediction(cd, w, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(cone::make_weight({0.0, 0.0}, 0.0), std::invalid_argument);
}

TEST_CASE("masked grids keep strict interior nodes and nest across the opening") {
  auto w = cone::make_weight({0.0, 0.0}, 1.0);
  double s = 1.0 / 16;

  auto half = cone::cone_grid(cone::make_cone(0.0), Side::cone, w, s);
  CHECK(!half.nodes.empty());
  for (const auto& x : half.nodes) CHECK(x.y <= -s + 1e-15);

  auto key = [&](const Vec2& x) {
    return std::pair<long, long>{std::lround(x.x / s), std::lround(x.y / s)};
  };
  std::set<std::pair<long, long>> prev;
  std::size_t prev_count = 0;
  for (double eps : {0.0, 0.3, 0.5}) {
    auto g = cone::cone_grid(cone::make_cone(eps), Side::cone, w, s);
    std::set<std::pair<long, long>> cur;
    for (const auto& x : g.nodes) {
      CHECK(cone::cone_membership(cone::make_cone(eps), x));
      cur.insert(key(x));
    }
    CHECK(cur.size() == g.nodes.size());
    for (const auto& k : prev) CHECK(cur.count(k) == 1);
    CHECK(cur.size() >= prev_count);
    prev = std::move(cur);
    prev_count = prev.size();
  }

  // five-point stencil: symmetric, 4/s^2 diagonal, positive definite form
  auto g = cone::cone_grid(cone::make_cone(0.5), Side::cone, w, s);
  spectral::SpMat diff = spectral::SpMat(g.laplacian.transpose()) - g.laplacian;
  CHECK(diff.norm() == 0.0);
  for (int k = 0; k < g.laplacian.outerSize(); ++k)
    for (spectral::SpMat::InnerIterator it(g.laplacian, k); it; ++it) {
      if (it.row() == it.col())
        CHECK(it.value() == doctest::Approx(4.0 * 256.0));
      else
        CHECK(it.value() == doctest::Approx(-256.0));
    }
  Eigen::VectorXd v(g.laplacian.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v(i) = rng::uniform(5, rng::streams::lanczos, static_cast<std::uint64_t>(i), -1.0, 1.0);
  CHECK(v.dot(g.laplacian * v) > 0.0);

  CHECK_THROWS_AS(cone::cone_grid(cone::make_cone(0.5), Side::cone, w, 0.0),
                  std::invalid_argument);
}

TEST_CASE("localized trace is monotone in the opening and across sides") {
  auto w = cone::make_weight({0.0, 0.0}, 1.0);
  // 1/h^2 = 36 keeps bound states in every side, including the half-plane,
  // whose shaved support only admits states above (j_{1,1} / 0.9064)^2 ~ 17.9
  double h = 1.0 / 6, s = 1.0 / 32;

  double prev = -1.0;
  std::vector<double> cone_traces;
  for (double eps : {0.0, 0.1, 0.3, 0.5}) {
    double t = cone::localized_cone_trace(cone::make_cone(eps), Side::cone, w, h, s);
    CHECK(t >= prev - 1e-10);
    cone_traces.push_back(t);
    prev = t;
  }
  CHECK(cone_traces.front() > 0.0);

  // mirror symmetry at eps = 0: the two half-planes carry the same trace
  double upper = cone::localized_cone_trace(cone::make_cone(0.0), Side::complement, w, h, s);
  CHECK(upper == doctest::Approx(cone_traces.front()).epsilon(1e-9));

  // the convex sector embeds into the cone after a half-turn, node for node
  for (double eps : {0.3, 0.5}) {
    auto cd = cone::make_cone(eps);
    double comp = cone::localized_cone_trace(cd, Side::complement, w, h, s);
    double full = cone::localized_cone_trace(cd, Side::cone, w, h, s);
    CHECK(comp <= full + 1e-10);
  }

  CHECK_THROWS_AS(cone::localized_cone_trace(cone::make_cone(0.5), Side::cone, w, h, 0.2),
                  std::invalid_argument);
}

TEST_CASE("localized trace is invariant under joint rescaling") {
  auto cd = cone::make_cone(0.5);
  double base = cone::localized_cone_trace(cd, Side::cone, cone::make_weight({0.0, 0.0}, 1.0),
                                           0.25, 1.0 / 32);
  CHECK(base > 0.0);
  double doubled = cone::localized_cone_trace(
      cd, Side::cone, cone::make_weight({0.0, 0.0}, 2.0), 0.5, 1.0 / 16);
  CHECK(doubled == doctest::Approx(base).epsilon(1e-12));

  double sesqui = cone::localized_cone_trace(
      cd, Side::cone, cone::make_weight({0.0, 0.0}, 1.5), 0.375, 1.5 / 32);
  CHECK(sesqui == doctest::Approx(base).epsilon(1e-7));
}

TEST_CASE("measured trace stays inside the large-h envelope") {
  auto cd = cone::make_cone(0.3);
  auto w = cone::make_weight({0.0, 0.0}, 1.0);
  double l2 = weyl::constants(2).riesz1;
  double l1 = weyl::constants(1).riesz1;
  for (double h : {1.0, 2.0}) {
    auto p = cone::cone_two_term_prediction(cd, w, h);
    double t = cone::localized_cone_trace(cd, Side::cone, w, h, 1.0 / 8);
    double envelope =
        2.0 * l2 / (h * h) * p.volume_integral + 0.25 * l1 / h * p.boundary_integral;
    CHECK(std::abs(t - p.value) <= envelope + 1e-9);
  }
}

TEST_CASE("trace experiment fills rows and validates its inputs") {
  cone::ConeExperiment e;
  e.cone = cone::make_cone(0.5);
  e.weight = cone::make_weight({0.0, 0.0}, 1.0);
  e.hs = {0.25};
  e.spacing_ratio = 8;  // fine grid 1/32, coarse 1/16
  auto rep = cone::cone_trace_experiment(e);
  REQUIRE(rep.rows.size() == 1);
  const auto& r = rep.rows.front();
  CHECK(rep.epsilon == 0.5);
  CHECK(rep.l == 1.0);
  CHECK(r.h == 0.25);
  CHECK(r.s == doctest::Approx(1.0 / 32).epsilon(1e-15));
  CHECK(r.measured > 0.0);
  CHECK(r.measured ==
        doctest::Approx(cone::localized_cone_trace(e.cone, e.side, e.weight, 0.25, r.s))
            .epsilon(1e-12));
  CHECK(r.predicted ==
        doctest::Approx(cone::cone_two_term_prediction(e.cone, e.weight, 0.25).value)
            .epsilon(1e-12));
  CHECK(r.remainder == doctest::Approx(r.measured - r.predicted).epsilon(1e-12));
  CHECK(r.normalized ==
        doctest::Approx(std::abs(r.remainder) / std::pow(4.0, 2.0 / 3.0)).epsilon(1e-12));
  CHECK(r.contamination == doctest::Approx(std::abs(r.measured - r.coarse)).epsilon(1e-12));
  CHECK(r.unreliable == (r.contamination > 0.2 * std::abs(r.remainder)));

  auto bad = e;
  bad.spacing_ratio = 4;  // coarse pass would sit at h/2, too close to resolve
  CHECK_THROWS_AS(cone::cone_trace_experiment(bad), std::invalid_argument);
  bad = e;
  bad.hs = {1.5};  // beyond the support radius
  CHECK_THROWS_AS(cone::cone_trace_experiment(bad), std::invalid_argument);
  bad = e;
  bad.hs.clear();
  CHECK_THROWS_AS(cone::cone_trace_experiment(bad), std::invalid_argument);
  bad = e;
  bad.hs = {-0.25};
  CHECK_THROWS_AS(cone::cone_trace_experiment(bad), std::invalid_argument);
}
