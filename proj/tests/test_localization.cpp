#include "weyl_lab/localization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "weyl_lab/brown.hpp"
#include "weyl_lab/geometry.hpp"
#include "weyl_lab/quadrature.hpp"
#include "weyl_lab/rng.hpp"

using namespace weyl_lab;
using geometry::Domain;
using geometry::Vec2;
using namespace weyl_lab::localization;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("bump profile normalization and shape") {
  auto bp = default_bump();

  CHECK(bp.value(0) == doctest::Approx(1.07131365924777794).epsilon(1e-11));
  CHECK(bp.value(1.0) == 0.0);
  CHECK(bp.value(1.5) == 0.0);
  CHECK(bp.value(-0.3) == bp.value(0.3));
  CHECK(bp.value(0.999) > 0.0);
  CHECK(bp.sup() == bp.value(0));

  // unit planar L2 mass, radial quadrature
  double mass = quadrature::adaptive_simpson(
      [&](double t) {
        double v = bp.value(t);
        return 2.0 * kPi * t * v * v;
      },
      0.0, 1.0, 1e-12);
  CHECK(std::abs(mass - 1.0) <= 1e-8);

  CHECK(bp.derivative(0) == 0.0);
  CHECK(bp.derivative(0.5) < 0.0);
  CHECK(bp.derivative(1.0) == 0.0);
  // finite-difference cross-check away from the support edge
  for (double t : {0.2, 0.45, 0.7}) {
    double s = 1e-6;
    double fd = (bp.value(t + s) - bp.value(t - s)) / (2 * s);
    CHECK(bp.derivative(t) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("length scale formula and Lipschitz bound") {
  auto sq = Domain::rectangle(1, 1);
  auto ls = make_length_scale(sq, 0.05);

  CHECK(length_scale(ls, {0.5, 0.4}) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(length_scale(ls, {0.5, 0.06}) == 0.05);
  CHECK(length_scale(ls, {0.5, -0.2}) == 0.05);
  CHECK(length_scale(ls, {0.5, 0.5}) == 0.25);

  // l = l0 exactly on the closed l0-collar
  CHECK(length_scale(ls, {0.5, 0.05}) == 0.05);
  CHECK(length_scale(ls, {0.5, -0.05}) == 0.05);

  CHECK_THROWS_AS(make_length_scale(sq, 0.0), std::invalid_argument);

  auto dk = Domain::disk(1);
  auto lsd = make_length_scale(dk, 0.1);
  for (const auto* pair : {&ls, &lsd}) {
    auto box = pair->domain->bbox().expanded(4 * pair->l0);
    int bad = 0;
    for (int i = 0; i < 100000; ++i) {
      auto draw = [&](std::uint64_t idx) {
        return Vec2{rng::uniform(7, rng::streams::gradient_x, idx, box.lo.x, box.hi.x),
                    rng::uniform(7, rng::streams::gradient_y, idx, box.lo.y, box.hi.y)};
      };
      Vec2 u = draw(2 * static_cast<std::uint64_t>(i));
      Vec2 v = draw(2 * static_cast<std::uint64_t>(i) + 1);
      double lhs = std::abs(length_scale(*pair, u) - length_scale(*pair, v));
      if (lhs > 0.5 * geometry::norm(u - v) + 1e-12) ++bad;
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("length scale gradient branches") {
  auto sq = Domain::rectangle(1, 1);
  auto ls = make_length_scale(sq, 0.05);

  // flat branch: zero gradient, no flag
  auto flat = length_scale_gradient(ls, {0.5, 0.07});
  CHECK(flat.grad.x == 0.0);
  CHECK(flat.grad.y == 0.0);
  CHECK(!flat.one_sided);

  // growing branch: half the unit inward direction
  auto grow = length_scale_gradient(ls, {0.5, 0.3});
  CHECK(grow.grad.x == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(grow.grad.y == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(!grow.one_sided);
  CHECK(geometry::norm(grow.grad) == doctest::Approx(0.5).epsilon(1e-14));

  // kinks: the diagonal (medial axis), the switch surface, the boundary
  CHECK(length_scale_gradient(ls, {0.3, 0.3}).one_sided);
  CHECK(length_scale_gradient(ls, {0.5, 0.1}).one_sided);
  CHECK(length_scale_gradient(ls, {0.5, 0.0}).one_sided);
  CHECK(!length_scale_gradient(ls, {0.5, -0.2}).one_sided);
}

TEST_CASE("localized bump values") {
  auto sq = Domain::rectangle(1, 1);
  auto bp = default_bump();

  // constant-scale region: pure rescaled profile, Jacobian factor 1
  auto wide = make_length_scale(sq, 0.3);
  Vec2 u{0.4, 0.5};
  CHECK(length_scale(wide, u) == 0.3);
  CHECK(bump_value(bp, wide, u, u) == bp.value(0));
  CHECK(bump_value(bp, wide, u, {0.4, 0.65}) == doctest::Approx(bp.value(0.5)).epsilon(1e-13));
  CHECK(bump_value(bp, wide, u, {0.7, 0.5}) == 0.0);

  auto ls = make_length_scale(sq, 0.05);
  for (Vec2 c : {Vec2{0.5, 0.3}, Vec2{0.5, 0.02}, Vec2{0.2, 0.5}, Vec2{0.5, 0.5}}) {
    double l = length_scale(ls, c);
    double supval = 0;
    for (int i = 0; i < 64; ++i) {
      double ang = 2 * kPi * i / 64;
      Vec2 dir{std::cos(ang), std::sin(ang)};
      CHECK(bump_value(bp, ls, c, c + (1.001 * l) * dir) == 0.0);
      CHECK(bump_value(bp, ls, c, c + l * dir) == 0.0);
      for (double frac : {0.1, 0.35, 0.62, 0.87})
        supval = std::max(supval, bump_value(bp, ls, c, c + (frac * l) * dir));
    }
    CHECK(supval <= std::sqrt(2.0) * bp.sup());
    CHECK(bump_value(bp, ls, c, c) == bp.value(0));
  }
}

TEST_CASE("partition of unity residual") {
  auto sq = Domain::rectangle(1, 1);
  auto bp = default_bump();
  auto ls = make_length_scale(sq, 0.05);

  // far outside the domain the scale is constant and the integral is the
  // plain convolution identity
  CHECK(partition_residual(bp, ls, {3.0, 3.0}) <= 1e-6);

  std::vector<Vec2> pts = {{0.5, 0.5}, {0.5, 0.02}, {0.5, 0.0},  {0.5, -0.03}, {0.2, 0.3},
                           {0.3, 0.3}, {0.05, 0.05}, {0.25, 0.25}, {0.5, 0.96}, {0.04, 0.5}};
  double worst4 = 0, worst8 = 0;
  for (Vec2 x : pts) {
    worst4 = std::max(worst4, partition_residual(bp, ls, x));
    worst8 = std::max(worst8, partition_residual(bp, ls, x, 8));
  }
  CHECK(worst4 <= 1e-3);
  CHECK(worst8 <= 1e-4);
  CHECK(4.0 * worst8 <= worst4);

  CHECK_THROWS_AS(partition_residual(bp, ls, {0.5, 0.5}, -1), std::invalid_argument);
  CHECK_THROWS_AS(partition_residual(bp, ls, {0.5, 0.5}, 13), std::invalid_argument);
}

TEST_CASE("region classification") {
  auto sq = Domain::rectangle(1, 1);

  auto gs1 = brown::good_set(sq, {0.5, 0.2});
  CHECK(classify(sq, {0.5, 0.5}, gs1, 0.05) == RegionLabel::bulk);
  CHECK(classify(sq, {0.5, 0.02}, gs1, 0.05) == RegionLabel::good);
  CHECK(classify(sq, {0.5, -0.2}, gs1, 0.05) == RegionLabel::exterior);

  auto gs2 = brown::good_set(sq, {0.6, 0.4});
  CHECK(classify(sq, {0.01, 0.01}, gs2, 0.05) == RegionLabel::bad);

  // good + bad is exactly the closed l0-collar
  double l0 = 0.04;
  auto box = sq.bbox().expanded(2 * l0);
  int mismatched = 0;
  for (int i = 0; i < 100000; ++i) {
    Vec2 u{rng::uniform(3, rng::streams::regions_x, static_cast<std::uint64_t>(i), box.lo.x,
                        box.hi.x),
           rng::uniform(3, rng::streams::regions_y, static_cast<std::uint64_t>(i), box.lo.y,
                        box.hi.y)};
    auto label = classify(sq, u, gs1, l0);
    bool collar = std::abs(sq.signed_distance(u)) <= l0;
    bool in_collar_label = label == RegionLabel::good || label == RegionLabel::bad;
    if (collar != in_collar_label) ++mismatched;
    if (label == RegionLabel::bulk && !(sq.signed_distance(u) > l0)) ++mismatched;
    if (label == RegionLabel::exterior && !(sq.signed_distance(u) < -l0)) ++mismatched;
  }
  CHECK(mismatched == 0);
}

TEST_CASE("region volumes on the unit square") {
  auto sq = Domain::rectangle(1, 1);
  auto gs = brown::good_set(sq, {0.5, 0.2});
  double l0 = 0.02;
  auto rv = region_volumes(sq, gs, l0, 400000, 11, 4);

  double inner = 4 * l0 - 4 * l0 * l0;
  double outer = 4 * l0 + kPi * l0 * l0;
  CHECK(rv.collar_exact == doctest::Approx(inner + outer).epsilon(1e-12));
  CHECK(rv.collar_match);
  CHECK(rv.within_bound);
  CHECK(rv.samples == 400000);

  // union is the sum of the label counts
  CHECK(rv.collar_union == doctest::Approx(rv.good + rv.bad).epsilon(1e-12));

  double bulk_exact = (1 - 2 * l0) * (1 - 2 * l0);
  CHECK(std::abs(rv.bulk - bulk_exact) <= 4 * rv.se_bulk);

  CHECK_THROWS_AS(region_volumes(sq, gs, 0.3, 1000, 1), std::invalid_argument);
  CHECK_THROWS_AS(region_volumes(sq, gs, 0.02, 0, 1), std::invalid_argument);
}

TEST_CASE("region volumes: smooth boundary has no bad set") {
  auto dk = Domain::disk(1);
  auto gs = brown::good_set(dk, {0.3, 0.5});
  auto rv = region_volumes(dk, gs, 0.05, 200000, 5, 2);
  CHECK(rv.bad == 0.0);
  CHECK(rv.se_bad == 0.0);
  CHECK(rv.collar_match);
  CHECK(rv.within_bound);
}

TEST_CASE("region volumes are thread-count invariant") {
  auto sq = Domain::rectangle(1, 1);
  auto gs = brown::good_set(sq, {0.5, 0.2});
  auto a = region_volumes(sq, gs, 0.03, 100000, 17, 1);
  auto b = region_volumes(sq, gs, 0.03, 100000, 17, 3);
  CHECK(a.bulk == b.bulk);
  CHECK(a.good == b.good);
  CHECK(a.bad == b.bad);
  CHECK(a.collar_union == b.collar_union);
  CHECK(a.se_union == b.se_union);
}

// phi Lap(phi f) = (phi^2 Lap f + Lap(phi^2 f))/2 - |grad phi|^2 f for smooth
// phi and f; checked with an order-6 stencil against analytic Lap f and the
// profile's analytic gradient
TEST_CASE("symmetrized localization identity on analytic pairs") {
  auto bp = default_bump();

  struct Pair {
    Vec2 u;
    double l;
    double (*f)(Vec2);
    double (*lap)(Vec2);
  };
  std::vector<Pair> pairs = {
      {{0.2, 0.1}, 0.3, [](Vec2 p) { return std::sin(3 * p.x) * std::cos(2 * p.y); },
       [](Vec2 p) { return -13.0 * std::sin(3 * p.x) * std::cos(2 * p.y); }},
      {{0.0, 0.0}, 0.5, [](Vec2 p) { return std::exp(0.5 * (p.x - p.y)); },
       [](Vec2 p) { return 0.5 * std::exp(0.5 * (p.x - p.y)); }},
      {{-0.1, 0.2}, 0.4, [](Vec2 p) { return p.x * p.x + p.y * p.y - p.x * p.y + 1; },
       [](Vec2) { return 4.0; }}};

  const double c[4] = {-490.0, 270.0, -27.0, 2.0};
  double s = 1e-3;
  double worst = 0;
  for (const auto& pr : pairs) {
    auto phi = [&](Vec2 p) { return bp.value(geometry::norm(p - pr.u) / pr.l); };
    auto lap6 = [&](auto&& g, Vec2 p) {
      double acc = 2 * c[0] * g(p);
      for (int k = 1; k <= 3; ++k) {
        acc += c[k] * (g({p.x + k * s, p.y}) + g({p.x - k * s, p.y}) +
                       g({p.x, p.y + k * s}) + g({p.x, p.y - k * s}));
      }
      return acc / (180.0 * s * s);
    };
    for (auto [frac, ang] : {std::pair{0.2, 0.3}, std::pair{0.45, 1.2},
                             std::pair{0.6, 2.2}, std::pair{0.3, 4.0}}) {
      Vec2 x = pr.u + (frac * pr.l) * Vec2{std::cos(ang), std::sin(ang)};
      double r = geometry::norm(x - pr.u);
      double gphi = bp.derivative(r / pr.l) / pr.l;
      double lhs = phi(x) * lap6([&](Vec2 p) { return phi(p) * pr.f(p); }, x);
      double rhs = 0.5 * (phi(x) * phi(x) * pr.lap(x) +
                          lap6([&](Vec2 p) { return phi(p) * phi(p) * pr.f(p); }, x)) -
                   gphi * gphi * pr.f(x);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("translation-invariant control reproduces the periodic trace") {
  auto coarse = translation_invariant_defect(32, 0.25, 0.025);
  auto fine = translation_invariant_defect(32, 0.25, 0.0125);

  CHECK(coarse.support > 100);
  CHECK(coarse.support == fine.support);
  CHECK(fine.lhs > 1.0);
  CHECK(fine.defect <= 1e-2);
  CHECK(fine.defect <= coarse.defect / 4);

  CHECK_THROWS_AS(translation_invariant_defect(4, 0.25, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(translation_invariant_defect(32, 0.6, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(translation_invariant_defect(32, 0.25, 0.0), std::invalid_argument);
}

TEST_CASE("localization defect experiment on the unit square") {
  auto sq = Domain::rectangle(1, 1);

  // l0 = 4h: every support ball is large enough to hold states at 1/h^2
  auto rep = localization_defect(sq, 0.1, 0.25, 79, 10);
  CHECK(rep.complete);
  CHECK(rep.l0 == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(rep.trace_full > 1.0);
  CHECK(rep.nodes >= 10);
  CHECK(rep.trace_localized >= 0.3 * rep.trace_full);
  CHECK(rep.trace_localized <= rep.trace_full);
  CHECK(rep.reference > 0.0);
  CHECK(rep.fitted_c == doctest::Approx(rep.defect / rep.reference).epsilon(1e-12));
  CHECK(rep.fitted_c < 0.1);

  // l0 = 2h sits below the smallest ball that can hold a state at this
  // energy (sqrt(lambda) l0 = 2 < j_{0,1}), so every localized trace is zero
  // and the defect equals the full trace; still bounded by the reference
  auto gap = localization_defect(sq, 0.1, 0.5, 79, 8);
  CHECK(gap.complete);
  CHECK(gap.nodes == 0);
  CHECK(gap.trace_localized == 0.0);
  CHECK(gap.defect == gap.trace_full);
  CHECK(gap.fitted_c < 0.1);

  CHECK_THROWS_AS(localization_defect(sq, 0.01, 0.5, 63), std::invalid_argument);
  CHECK_THROWS_AS(localization_defect(sq, 0.1, 0.0, 127), std::invalid_argument);
  CHECK_THROWS_AS(localization_defect(sq, 0.1, 1.5, 127), std::invalid_argument);
  CHECK_THROWS_AS(localization_defect(sq, 0.1, 0.5, 127, 1), std::invalid_argument);
}
