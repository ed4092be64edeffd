#include "weyl_lab/weyl.hpp"

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "weyl_lab/geometry.hpp"
#include "weyl_lab/rng.hpp"
#include "weyl_lab/spectral.hpp"

using namespace weyl_lab;
using geometry::Domain;

namespace {

constexpr double kPi = std::numbers::pi_v<double>;

}  // namespace

TEST_CASE("phase-space constants match closed forms and the order identity") {
  auto c2 = weyl::constants(2);
  CHECK(c2.ball_volume == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(c2.riesz1 == doctest::Approx(1.0 / (8 * kPi)).epsilon(1e-12));
  CHECK(c2.riesz_gamma(1) == doctest::Approx(1.0 / (8 * kPi)).epsilon(1e-12));

  auto c1 = weyl::constants(1);
  CHECK(c1.ball_volume == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(c1.riesz1 == doctest::Approx(2.0 / (3 * kPi)).epsilon(1e-12));

  CHECK(weyl::constants(3).ball_volume == doctest::Approx(4 * kPi / 3).epsilon(1e-12));

  for (int d = 1; d <= 16; ++d) {
    auto c = weyl::constants(d);
    CHECK(c.riesz_gamma(1) == doctest::Approx(c.riesz1).epsilon(1e-12));
    // differentiating the order-1 term reproduces the counting coefficient
    CHECK((1 + d / 2.0) * c.riesz1 ==
          doctest::Approx(c.ball_volume / std::pow(2 * kPi, d)).epsilon(1e-12));
  }

  CHECK_THROWS_AS((void)weyl::constants(0), std::invalid_argument);
  CHECK_THROWS_AS((void)weyl::constants(17), std::invalid_argument);
  CHECK_THROWS_AS((void)c2.riesz_gamma(-1), std::invalid_argument);
}

TEST_CASE("two-term prediction closed form and measure scaling") {
  auto sq = Domain::rectangle(1, 1).summary();
  CHECK(weyl::two_term_riesz(sq, 100) == doctest::Approx(1750.0 / (3 * kPi)).epsilon(1e-12));
  CHECK(weyl::two_term_riesz(sq, 0) == 0.0);
  CHECK_THROWS_AS((void)weyl::two_term_riesz(sq, -1), std::invalid_argument);

  // doubling the square scales the bulk term by s^2 and the boundary by s
  auto big = Domain::rectangle(2, 2).summary();
  double lam = 37.5;
  double bulk = 1.0 / (8 * kPi) * lam * lam;
  double boundary = (2.0 / (3 * kPi)) * std::pow(lam, 1.5);
  CHECK(weyl::two_term_riesz(big, lam) ==
        doctest::Approx(4 * bulk - 2 * boundary).epsilon(1e-12));
}

TEST_CASE("order-raising identity is exact on oracle spectra") {
  auto sq = spectral::exact_rectangle_spectrum(1, 1, 2500);
  auto chk = weyl::check_aizenman_lieb(sq, 2500, 100);
  CHECK(chk.direct == doctest::Approx(600 - 40 * kPi * kPi).epsilon(1e-12));
  CHECK(chk.integrated == doctest::Approx(chk.direct).epsilon(1e-12));
  CHECK(chk.residual <= 1e-10 * chk.direct);

  auto below = weyl::check_aizenman_lieb(sq, 2500, 0.5);
  CHECK(below.direct == 0.0);
  CHECK(below.integrated == 0.0);
  CHECK(below.residual == 0.0);

  auto quad = weyl::check_aizenman_lieb(sq, 2500, 100, 1, 2);
  CHECK(quad.direct == doctest::Approx(spectral::riesz_mean(sq, 2, 100)).epsilon(1e-14));
  CHECK(quad.residual <= 1e-10 * quad.direct);

  auto dk = spectral::exact_disk_spectrum(1, 1000);
  for (int t = 0; t < 50; ++t) {
    double ls = rng::uniform(4242, rng::streams::lambda_pick, 2 * t, 50.0, 2400.0);
    double ld = rng::uniform(4242, rng::streams::lambda_pick, 2 * t + 1, 20.0, 950.0);
    for (auto [ev, cut, lam] : {std::tuple{&sq, 2500.0, ls}, std::tuple{&dk, 1000.0, ld}}) {
      auto a = weyl::check_aizenman_lieb(*ev, cut, lam, 0, 1);
      CHECK(a.residual <= 1e-10 * a.direct);
      auto b = weyl::check_aizenman_lieb(*ev, cut, lam, 1, 2);
      CHECK(b.residual <= 1e-10 * b.direct);
    }
  }

  CHECK_THROWS_AS((void)weyl::check_aizenman_lieb(sq, 2500, 3000), std::invalid_argument);
  CHECK_THROWS_AS((void)weyl::check_aizenman_lieb(sq, 2500, 100, 0, 2), std::invalid_argument);
}

TEST_CASE("midpoint grids avoid eigenvalues and stay ordered") {
  auto ev = spectral::exact_rectangle_spectrum(1, 1, 1e5);
  auto grid = weyl::midpoint_log_grid(ev, 1e3, 1e5, 16);
  REQUIRE(grid.size() >= 20);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0) CHECK(grid[i] > grid[i - 1]);
    CHECK(grid[i] >= 1e3);
    CHECK(grid[i] <= 1e5);
    spectral::TieFlag flag;
    spectral::counting(ev, grid[i], &flag);
    CHECK(!flag.tie);
  }
  CHECK_THROWS_AS((void)weyl::midpoint_log_grid(ev, 10, 1, 8), std::invalid_argument);
}

TEST_CASE("remainder shrinks once the boundary term is subtracted") {
  auto ev = spectral::exact_rectangle_spectrum(1, 1, 1e5);
  auto sq = Domain::rectangle(1, 1).summary();
  auto grid = weyl::midpoint_log_grid(ev, 1e3, 1e5, 16);

  auto two = weyl::remainder_series(ev, 1e5, sq, grid, 2);
  REQUIRE(two.decades.size() == 2);
  CHECK(two.decades[1].median < two.decades[0].median);
  CHECK(two.slope <= 1.1);
  CHECK(two.slope >= 0.7);
  for (const auto& pt : two.points) {
    CHECK(pt.riesz > 0);
    // phase-space upper bound: the bulk term alone dominates the Riesz mean
    CHECK(pt.riesz <= sq.area * pt.lambda * pt.lambda / (8 * kPi) * (1 + 1e-12));
  }

  auto one = weyl::remainder_series(ev, 1e5, sq, grid, 1);
  CHECK(one.slope >= 1.45);
  CHECK(one.slope <= 1.55);

  auto wide = weyl::remainder_series(ev, 1e5, sq, weyl::midpoint_log_grid(ev, 1e2, 1e5, 16), 2);
  REQUIRE(wide.decades.size() == 3);
  CHECK(wide.decades[2].median < 0.25 * wide.decades[0].median);

  auto dk = spectral::exact_disk_spectrum(1, 1e4);
  auto dsum = Domain::disk(1).summary();
  auto dgrid = weyl::midpoint_log_grid(dk, 1e2, 1e4, 16);
  auto dser = weyl::remainder_series(dk, 1e4, dsum, dgrid, 2);
  REQUIRE(dser.decades.size() == 2);
  CHECK(dser.decades[1].median < dser.decades[0].median);
  CHECK(weyl::remainder_series(dk, 1e4, dsum, dgrid, 1).slope >= 1.45);

  CHECK_THROWS_AS((void)weyl::remainder_series(ev, 1e5, sq, {}, 2), std::invalid_argument);
  CHECK_THROWS_AS((void)weyl::remainder_series(ev, 1e5, sq, {50, 40}, 2), std::invalid_argument);
  CHECK_THROWS_AS((void)weyl::remainder_series(ev, 1e3, sq, grid, 2), std::invalid_argument);
  CHECK_THROWS_AS((void)weyl::remainder_series(ev, 1e5, sq, grid, 3), std::invalid_argument);
}

TEST_CASE("convex remainder bound stays bounded across decades and domains") {
  auto ev = spectral::exact_rectangle_spectrum(1, 1, 1e5);
  auto sq = Domain::rectangle(1, 1).summary();
  auto rep = weyl::check_universal_convex_bound(ev, 1e5, sq,
                                                weyl::midpoint_log_grid(ev, 1e2, 1e5, 16));
  CHECK(rep.bounded);
  CHECK(rep.decade_ratio <= 1.5);
  CHECK(rep.fitted_c > 0);
  CHECK(rep.fitted_c < 0.05);

  auto dk = spectral::exact_disk_spectrum(1, 1e4);
  auto drep = weyl::check_universal_convex_bound(dk, 1e4, Domain::disk(1).summary(),
                                                 weyl::midpoint_log_grid(dk, 1e2, 1e4, 16));
  CHECK(drep.bounded);
  CHECK(rep.fitted_c < 5 * drep.fitted_c);
  CHECK(drep.fitted_c < 5 * rep.fitted_c);

  geometry::GeometrySummary degenerate;
  CHECK_THROWS_AS((void)weyl::check_universal_convex_bound(ev, 1e5, degenerate, {150.0}),
                  std::invalid_argument);
}
