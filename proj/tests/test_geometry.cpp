#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "weyl_lab/geometry.hpp"
#include "weyl_lab/rng.hpp"

using namespace weyl_lab;
using geometry::Domain;
using geometry::Side;
using geometry::Vec2;

namespace {
constexpr double kPi = 3.14159265358979323846;

Domain unit_square() { return Domain::rectangle(1, 1); }

Domain pentagon() {
  return Domain::convex_polygon(
      {{0.05, 0.0}, {0.95, 0.1}, {1.0, 0.7}, {0.5, 1.05}, {0.0, 0.6}});
}
}  // namespace

TEST_CASE("serialization round trips are bit exact") {
  std::vector<std::string> records = {
      "rect 1 1", "rect 0.1 2.5", "disk 1", "disk 0.3333333333333333",
      "poly 0 0 1 0 0.5 0.8660254037844386"};
  for (const auto& r : records) {
    Domain d = Domain::parse(r);
    CHECK(d.serialize() == r);
    Domain d2 = Domain::parse(d.serialize());
    CHECK(d2.serialize() == d.serialize());
  }
}

TEST_CASE("parse failures carry a column") {
  CHECK_THROWS_AS(Domain::parse("rect 1"), geometry::ParseError);
  CHECK_THROWS_AS(Domain::parse("rect 1 x"), geometry::ParseError);
  CHECK_THROWS_AS(Domain::parse("sphere 1"), geometry::ParseError);
  CHECK_THROWS_AS(Domain::parse("poly 0 0 1 0 0.5"), geometry::ParseError);
  try {
    Domain::parse("rect 1 bogus");
  } catch (const geometry::ParseError& e) {
    CHECK(e.column == 8);
  }
}

TEST_CASE("validation rejects degenerate input") {
  CHECK_THROWS_AS(Domain::rectangle(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Domain::disk(-2), std::invalid_argument);
  // reflex vertex
  CHECK_THROWS_WITH_AS(
      Domain::convex_polygon({{0, 0}, {2, 0}, {1, 0.5}, {2, 2}, {0, 2}}),
      doctest::Contains("reflex"), std::invalid_argument);
  // collinear triple
  CHECK_THROWS_AS(Domain::convex_polygon({{0, 0}, {1, 0}, {2, 0}, {1, 1}}),
                  std::invalid_argument);
}

TEST_CASE("signed distance closed forms") {
  Domain sq = unit_square();
  CHECK(sq.signed_distance({0.2, 0.5}) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(sq.signed_distance({0.5, 0.5}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(sq.signed_distance({-0.3, 0.5}) == doctest::Approx(-0.3).epsilon(1e-14));
  CHECK(sq.signed_distance({-0.3, -0.4}) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(sq.signed_distance({0.5, 0.0}) == doctest::Approx(0.0));

  Domain dk = Domain::disk(1);
  CHECK(dk.signed_distance({0.3, 0.4}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(dk.signed_distance({3, 4}) == doctest::Approx(-4.0).epsilon(1e-14));
}

TEST_CASE("distance gradient has unit norm away from kinks") {
  std::vector<Domain> domains;
  domains.push_back(unit_square());
  domains.push_back(pentagon());
  domains.push_back(Domain::disk(0.8));
  const double step = 1e-6;
  for (const auto& d : domains) {
    auto box = d.bbox().expanded(0.5);
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
      Vec2 p{rng::uniform(7, rng::streams::gradient_x, static_cast<std::uint64_t>(i),
                          box.lo.x, box.hi.x),
             rng::uniform(7, rng::streams::gradient_y, static_cast<std::uint64_t>(i),
                          box.lo.y, box.hi.y)};
      double sd = d.signed_distance(p);
      auto proj = d.project_boundary(p);
      if (std::abs(sd) < 1e-3 || proj.feature_gap < 1e-3) continue;
      double gx = (d.signed_distance({p.x + step, p.y}) -
                   d.signed_distance({p.x - step, p.y})) /
                  (2 * step);
      double gy = (d.signed_distance({p.x, p.y + step}) -
                   d.signed_distance({p.x, p.y - step})) /
                  (2 * step);
      CHECK(std::abs(std::hypot(gx, gy) - 1.0) < 1e-5);
      ++checked;
    }
    CHECK(checked > 500);
  }
}

TEST_CASE("projection agrees with the distance and flags features") {
  Domain sq = unit_square();
  auto pr = sq.project_boundary({0.2, 0.5});
  CHECK(pr.dist == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(pr.edge >= 0);
  CHECK(pr.point.x == doctest::Approx(0.0));
  // outside past a corner the projection hits the vertex
  auto pv = sq.project_boundary({-0.3, -0.4});
  CHECK(pv.vertex >= 0);
  CHECK(pv.dist == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("summary closed forms") {
  auto s = unit_square().summary();
  CHECK(s.area == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.perimeter == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(s.inradius == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.incenter.x == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(s.incenter.y == doctest::Approx(0.5).epsilon(1e-9));

  auto r = Domain::rectangle(2, 1).summary();
  CHECK(r.area == doctest::Approx(2.0));
  CHECK(r.perimeter == doctest::Approx(6.0));
  CHECK(r.inradius == doctest::Approx(0.5).epsilon(1e-12));

  // equilateral triangle, side 1: inradius 1/(2 sqrt 3)
  Domain tri = Domain::convex_polygon({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}});
  auto ts = tri.summary();
  CHECK(ts.inradius == doctest::Approx(0.28867513459481288).epsilon(1e-12));
  CHECK(ts.area == doctest::Approx(std::sqrt(3.0) / 4).epsilon(1e-14));
  CHECK(ts.perimeter == doctest::Approx(3.0).epsilon(1e-14));

  // right isoceles triangle: r = (a + b - c)/2, incenter at (r, r)
  Domain rt = Domain::convex_polygon({{0, 0}, {1, 0}, {0, 1}});
  auto rs = rt.summary();
  double rexp = (2.0 - std::sqrt(2.0)) / 2.0;
  CHECK(rs.inradius == doctest::Approx(rexp).epsilon(1e-12));
  CHECK(rs.incenter.x == doctest::Approx(rexp).epsilon(1e-9));
  CHECK(rs.incenter.y == doctest::Approx(rexp).epsilon(1e-9));

  // the Chebyshev center realizes the inradius as a signed distance
  Domain pent = pentagon();
  auto ps = pent.summary();
  CHECK(pent.signed_distance(ps.incenter) == doctest::Approx(ps.inradius).epsilon(1e-12));
}

TEST_CASE("inner parallel set") {
  Domain sq = unit_square();
  Domain inner = sq.inner_parallel_set(0.2);
  CHECK(inner.kind() == geometry::DomainKind::rectangle);
  CHECK(inner.rect_width() == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(inner.area() == doctest::Approx(0.36).epsilon(1e-14));
  CHECK(inner.perimeter() == doctest::Approx(2.4).epsilon(1e-14));

  // t = 0 is the identity
  Domain pent = pentagon();
  CHECK(pent.inner_parallel_set(0).serialize() == pent.serialize());

  CHECK_THROWS_AS(sq.inner_parallel_set(0.5), std::invalid_argument);
  CHECK_THROWS_AS(sq.inner_parallel_set(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(Domain::disk(1).inner_parallel_set(0.1), std::invalid_argument);

  // triangles offset homothetically: P(Omega_t) = P (1 - t/r) exactly
  Domain tri = Domain::convex_polygon({{0, 0}, {1.3, 0.1}, {0.4, 0.9}});
  auto s = tri.summary();
  for (double t : {0.1 * s.inradius, 0.5 * s.inradius, 0.9 * s.inradius}) {
    double pt = tri.inner_parallel_set(t).perimeter();
    CHECK(pt == doctest::Approx(s.perimeter * (1 - t / s.inradius)).epsilon(1e-10));
  }
}

TEST_CASE("shell volumes, exact") {
  Domain sq = unit_square();
  CHECK(sq.shell_volume(0.1, Side::inner) == doctest::Approx(0.36).epsilon(1e-14));
  CHECK(sq.shell_volume(0.1, Side::outer) ==
        doctest::Approx(0.4 + kPi * 0.01).epsilon(1e-14));
  Domain dk = Domain::disk(1);
  CHECK(dk.shell_volume(0.1, Side::inner) == doctest::Approx(0.19 * kPi).epsilon(1e-14));
  CHECK(dk.shell_volume(0.1, Side::outer) == doctest::Approx(0.21 * kPi).epsilon(1e-14));
  // convex polygon outer shell is the Steiner formula
  Domain pent = pentagon();
  CHECK(pent.shell_volume(0.07, Side::outer) ==
        doctest::Approx(pent.perimeter() * 0.07 + kPi * 0.07 * 0.07).epsilon(1e-14));
  CHECK_THROWS_AS(sq.shell_volume(0.6, Side::inner), std::invalid_argument);
}

TEST_CASE("shell volume monte carlo agrees and is thread independent") {
  Domain pent = pentagon();
  for (auto side : {Side::inner, Side::outer}) {
    double exact = pent.shell_volume(0.08, side);
    auto est = pent.shell_volume_mc(0.08, side, 31, 200000, 1);
    CHECK(std::abs(est.value - exact) < 4 * est.std_error);
    auto est4 = pent.shell_volume_mc(0.08, side, 31, 200000, 4);
    CHECK(est4.value == est.value);  // bitwise: counter RNG + block sums
    CHECK(est4.std_error == est.std_error);
  }
}

TEST_CASE("theta closed forms on the square and disk") {
  Domain sq = unit_square();
  for (double t : {0.01, 0.1, 0.3}) {
    auto th = sq.theta(t);
    CHECK(th.theta_inner == doctest::Approx(-t).epsilon(1e-12));
    CHECK(th.theta_outer == doctest::Approx(kPi * t / 4).epsilon(1e-12));
    CHECK(th.theta_bar == doctest::Approx(0.5 * (t + kPi * t / 4)).epsilon(1e-10));
  }
  Domain dk = Domain::disk(1);
  for (double t : {0.01, 0.1, 0.3}) {
    auto th = dk.theta(t);
    CHECK(th.theta_inner == doctest::Approx(-t / 2).epsilon(1e-12));
    CHECK(th.theta_outer == doctest::Approx(t / 2).epsilon(1e-12));
    CHECK(th.theta_bar == doctest::Approx(t / 2).epsilon(1e-10));
  }
  // polygons: outer theta is pi t / P for any convex polygon
  Domain pent = pentagon();
  auto th = pent.theta(0.05);
  CHECK(th.theta_outer == doctest::Approx(kPi * 0.05 / pent.perimeter()).epsilon(1e-12));
  // theta_bar dominates the pointwise values and is monotone
  CHECK(th.theta_bar >= 0.5 * std::max(std::abs(th.theta_inner), th.theta_outer));
  double prev = 0;
  for (double t : {0.01, 0.03, 0.06, 0.1}) {
    double tb = pent.theta(t).theta_bar;
    CHECK(tb >= prev - 1e-15);
    prev = tb;
  }
}

TEST_CASE("convex bounds hold on a family of random hulls") {
  for (int trial = 0; trial < 25; ++trial) {
    int npts = 5 + static_cast<int>(rng::u01(99, rng::streams::polygon_count,
                                             static_cast<std::uint64_t>(trial)) *
                                    26);
    Domain poly = geometry::random_convex_polygon(1000 + static_cast<std::uint64_t>(trial), npts);
    auto s = poly.summary();
    auto rep = poly.check_convex_bounds(
        {0.1 * s.inradius, 0.4 * s.inradius, 0.8 * s.inradius});
    CHECK(rep.inradius_ok);
    CHECK(rep.all_ok);
  }
  // and on the disk, where the offset perimeter saturates the lower bound
  auto rep = Domain::disk(1).check_convex_bounds({0.1, 0.5, 0.9});
  CHECK(rep.all_ok);
  for (const auto& row : rep.rows)
    CHECK(row.offset_perimeter == doctest::Approx(row.lower).epsilon(1e-12));
}

TEST_CASE("geometric grid spans the requested decades") {
  auto g = geometry::geometric_grid(1e-7, 0.1, 64);
  CHECK(g.front() == doctest::Approx(1e-7));
  CHECK(g.back() == doctest::Approx(0.1));
  CHECK(static_cast<int>(g.size()) >= 64 * 6);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
}

TEST_CASE("convex hull drops collinear points") {
  std::vector<Vec2> grid;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) grid.push_back({static_cast<double>(i), static_cast<double>(j)});
  auto h = geometry::convex_hull(grid);
  CHECK(h.size() == 4);
}
