#include "weyl_lab/brown.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "weyl_lab/rng.hpp"

namespace weyl_lab::brown {

using geometry::Domain;
using geometry::DomainKind;
using geometry::Vec2;

namespace {

void validate(const GoodParams& gp) {
  if (!(gp.eps > 0) || !(gp.eps < 1)) throw std::invalid_argument("eps must lie in (0, 1)");
  if (!(gp.r > 0)) throw std::invalid_argument("r must be positive");
}

// Does some x on segment [A,B], strictly inside the open ball B_r(p), leave the
// open cone |(x-p).nu| < eps |x-p|? Both conditions reduce to quadratics in the
// segment parameter, so the worst offender is an endpoint of the ball chord or
// the interior critical point, checked exactly.
bool cone_violated(Vec2 A, Vec2 B, Vec2 p, Vec2 nu, double eps, double r) {
  Vec2 v = A - p;
  Vec2 D = B - A;
  double dd = norm2(D);
  if (dd == 0) return false;
  double b = dot(v, D);
  double c0 = norm2(v) - r * r;
  double disc = b * b - dd * c0;
  if (disc <= 0) return false;  // segment line misses the open ball
  double sq = std::sqrt(disc);
  double s1 = std::max((-b - sq) / dd, 0.0);
  double s2 = std::min((-b + sq) / dd, 1.0);
  if (!(s1 < s2)) return false;

  double e2 = eps * eps;
  double alpha = dot(v, nu);
  double beta = dot(D, nu);
  double qa = beta * beta - e2 * dd;
  double qb = alpha * beta - e2 * b;  // q(s) = qa s^2 + 2 qb s + qc
  double qc = alpha * alpha - e2 * norm2(v);
  auto q = [&](double s) { return (qa * s + 2 * qb) * s + qc; };

  double cand[3] = {s1, s2, 0};
  int nc = 2;
  if (qa < 0) {
    double sc = -qb / qa;
    if (sc > s1 && sc < s2) cand[nc++] = sc;
  }
  double best = -std::numeric_limits<double>::infinity();
  double sbest = s1;
  for (int i = 0; i < nc; ++i) {
    double val = q(cand[i]);
    if (val > best) {
      best = val;
      sbest = cand[i];
    }
  }
  double scale2 = std::max({norm2(v), norm2(v + D), r * r});
  double tolq = 1e-13 * scale2;
  if (best > tolq) return true;
  if (best < -tolq) return false;
  // grazing case: equality on the sphere |x-p| = r is not a violation, equality
  // strictly inside the ball is
  double w2 = norm2(v + sbest * D);
  return w2 < r * r * (1 - 1e-12);
}

bool edge_point_good(const Domain& d, int home, Vec2 p, const GoodParams& gp) {
  const auto& vs = d.vertices();
  const auto E = static_cast<int>(vs.size());
  Vec2 nu = d.edge_normals()[home];
  for (int f = 0; f < E; ++f) {
    if (f == home) continue;
    if (cone_violated(vs[f], vs[(f + 1) % E], p, nu, gp.eps, gp.r)) return false;
  }
  return true;
}

struct EdgeFrame {
  Vec2 A;
  Vec2 tangent;  // unit, toward the next vertex
  Vec2 nu;       // unit inward
  double len = 0;
};

EdgeFrame edge_frame(const Domain& d, int e) {
  const auto& vs = d.vertices();
  const auto E = static_cast<int>(vs.size());
  EdgeFrame f;
  f.A = vs[e];
  f.len = d.edge_lengths()[e];
  f.tangent = (1.0 / f.len) * (vs[(e + 1) % E] - vs[e]);
  f.nu = d.edge_normals()[e];
  return f;
}

double domain_scale(const Domain& d) {
  auto box = d.bbox();
  return std::max(box.width(), box.height());
}

// membership of u in the window Gamma above a boundary point p
bool in_gamma(Vec2 u, Vec2 p, Vec2 nu, double eps, double r) {
  Vec2 w = u - p;
  double w2 = norm2(w);
  if (!(w2 > 0) || !(w2 < 0.25 * r * r)) return false;
  double a = dot(w, nu);
  return a * a > (1 - eps * eps) * w2;
}

}  // namespace

bool is_good_point(const Domain& d, Vec2 p, const GoodParams& gp) {
  validate(gp);
  if (d.kind() == DomainKind::disk) {
    double R = d.disk_radius();
    if (std::abs(norm(p) - R) > 1e-9 * R)
      throw std::invalid_argument("point does not lie on the circle");
    return gp.r <= 2 * gp.eps * R;
  }
  auto proj = d.project_boundary(p);
  if (proj.dist > 1e-9 * domain_scale(d))
    throw std::invalid_argument("point does not lie on the boundary");
  if (proj.vertex >= 0)
    throw std::invalid_argument("good-point test needs an edge-interior point, not a vertex");
  auto f = edge_frame(d, proj.edge);
  Vec2 snapped = f.A + proj.s * f.tangent;
  return edge_point_good(d, proj.edge, snapped, gp);
}

GoodSet good_set(const Domain& d, const GoodParams& gp) {
  validate(gp);
  GoodSet gs;
  gs.params = gp;
  gs.total_length = d.perimeter();
  if (d.kind() == DomainKind::disk) {
    gs.disk_good = gp.r <= 2 * gp.eps * d.disk_radius();
    gs.good_length = gs.disk_good ? gs.total_length : 0;
    return gs;
  }

  const auto E = static_cast<int>(d.vertices().size());
  gs.per_edge.resize(E);
  double tol = 1e-12 * gs.total_length;
  for (int e = 0; e < E; ++e) {
    auto f = edge_frame(d, e);
    auto good = [&](double s) { return edge_point_good(d, e, f.A + s * f.tangent, gp); };

    double cap = std::min(tol, 0.25 * f.len);
    long n = std::clamp(static_cast<long>(std::ceil(f.len / (gp.r / 64.0))), 64l, 1l << 17);
    auto at = [&](long i) { return cap + (f.len - 2 * cap) * static_cast<double>(i) / n; };

    auto bisect = [&](double a, double b, bool ga) {
      while (b - a > tol) {
        double m = 0.5 * (a + b);
        if (good(m) == ga)
          a = m;
        else
          b = m;
      }
      return 0.5 * (a + b);
    };

    auto& ivs = gs.per_edge[e];
    bool prev = good(at(0));
    double cur = prev ? 0.0 : -1.0;
    for (long i = 1; i <= n; ++i) {
      bool gi = good(at(i));
      if (gi == prev) continue;
      double t = bisect(at(i - 1), at(i), prev);
      if (prev)
        ivs.emplace_back(cur, t);
      else
        cur = t;
      prev = gi;
    }
    if (prev) ivs.emplace_back(cur, f.len);
    for (const auto& iv : ivs) gs.good_length += iv.second - iv.first;
  }
  return gs;
}

double mu(const Domain& d, const GoodParams& gp) { return good_set(d, gp).mu(); }

namespace {

RegionWitness candidate_search(const Domain& d, Vec2 u, const GoodSet& gs) {
  double eps = gs.params.eps;
  double r = gs.params.r;
  if (d.kind() == DomainKind::disk) {
    if (!gs.disk_good) return {};
    double R = d.disk_radius();
    double un = norm(u);
    Vec2 p = un > 1e-300 ? (R / un) * u : Vec2{R, 0};
    double rho = std::abs(R - un);
    if (rho > 0 && rho < 0.5 * r) {
      Vec2 nu = (-1.0 / R) * p;
      return {true, {p, nu, -1, R * std::atan2(p.y, p.x)}};
    }
    return {};
  }

  double slope = eps / std::sqrt(1 - eps * eps);
  const auto E = static_cast<int>(d.vertices().size());
  for (int e = 0; e < E; ++e) {
    if (gs.per_edge[e].empty()) continue;
    auto f = edge_frame(d, e);
    double dn = dot(f.nu, u) - dot(f.nu, f.A);  // signed distance to the edge line
    double adn = std::abs(dn);
    if (!(adn > 0) || !(adn < 0.5 * r)) continue;
    double w = std::min(slope * adn, std::sqrt(0.25 * r * r - dn * dn));
    double proj = dot(u - f.A, f.tangent);
    for (const auto& iv : gs.per_edge[e]) {
      double lo = std::max(iv.first, proj - w);
      double hi = std::min(iv.second, proj + w);
      if (!(lo < hi)) continue;
      double s = (proj > lo && proj < hi) ? proj : 0.5 * (lo + hi);
      Vec2 p = f.A + s * f.tangent;
      if (in_gamma(u, p, f.nu, eps, r)) return {true, {p, f.nu, e, s}};
    }
  }
  return {};
}

RegionWitness sweep_search(const Domain& d, Vec2 u, const GoodSet& gs, double density) {
  double eps = gs.params.eps;
  double r = gs.params.r;
  if (d.kind() == DomainKind::disk) {
    if (!gs.disk_good) return {};
    double R = d.disk_radius();
    long m = std::max(16l, static_cast<long>(std::ceil(2 * 3.14159265358979324 * R * density)));
    for (long j = 0; j < m; ++j) {
      double phi = 2 * 3.14159265358979324 * (j + 0.5) / m;
      Vec2 p{R * std::cos(phi), R * std::sin(phi)};
      if (in_gamma(u, p, {-std::cos(phi), -std::sin(phi)}, eps, r))
        return {true, {p, {-std::cos(phi), -std::sin(phi)}, -1, R * phi}};
    }
    return {};
  }
  const auto E = static_cast<int>(gs.per_edge.size());
  for (int e = 0; e < E; ++e) {
    if (gs.per_edge[e].empty()) continue;
    auto f = edge_frame(d, e);
    for (const auto& iv : gs.per_edge[e]) {
      long m = std::max(2l, static_cast<long>(std::ceil((iv.second - iv.first) * density)));
      for (long j = 0; j < m; ++j) {
        double s = iv.first + (iv.second - iv.first) * (j + 0.5) / m;
        Vec2 p = f.A + s * f.tangent;
        if (in_gamma(u, p, f.nu, eps, r)) return {true, {p, f.nu, e, s}};
      }
    }
  }
  return {};
}

}  // namespace

RegionWitness in_good_region(const Domain& d, Vec2 u, const GoodSet& gs, bool strict) {
  auto hit = candidate_search(d, u, gs);
  if (hit.covered || !strict) return hit;
  // candidates are complete for these shapes; the sweep is a cross-check that
  // doubles its density until the verdict repeats
  int stable = 0;
  for (double density = 2048; density <= 2048 * 64; density *= 2) {
    auto swept = sweep_search(d, u, gs, density);
    if (swept.covered) return swept;
    if (++stable >= 2) break;
  }
  return {};
}

BadShellReport bad_shell_volume(const Domain& d, const GoodParams& gp, double s,
                                std::uint64_t seed, std::int64_t samples, int threads) {
  validate(gp);
  if (!(s > 0)) throw std::invalid_argument("shell depth must be positive");
  if (samples < 1) throw std::invalid_argument("need at least one sample");
  GoodSet gs = good_set(d, gp);

  auto box = d.bbox().expanded(s);
  double box_area = box.area();

  constexpr std::int64_t kBlock = 8192;
  std::int64_t nblocks = (samples + kBlock - 1) / kBlock;
  std::vector<std::int64_t> hits(static_cast<std::size_t>(nblocks), 0);

  auto run = [&](std::int64_t b0, std::int64_t b1) {
    for (std::int64_t blk = b0; blk < b1; ++blk) {
      std::int64_t lo = blk * kBlock, hi = std::min(samples, lo + kBlock);
      std::int64_t cnt = 0;
      for (std::int64_t i = lo; i < hi; ++i) {
        Vec2 x{rng::uniform(seed, rng::streams::bad_shell_x, static_cast<std::uint64_t>(i),
                            box.lo.x, box.hi.x),
               rng::uniform(seed, rng::streams::bad_shell_y, static_cast<std::uint64_t>(i),
                            box.lo.y, box.hi.y)};
        if (std::abs(d.signed_distance(x)) >= s) continue;
        if (!in_good_region(d, x, gs).covered) ++cnt;
      }
      hits[static_cast<std::size_t>(blk)] = cnt;
    }
  };

  int nt = std::max(1, std::min<int>(threads, static_cast<int>(nblocks)));
  if (nt == 1) {
    run(0, nblocks);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) {
      std::int64_t b0 = nblocks * t / nt, b1 = nblocks * (t + 1) / nt;
      pool.emplace_back(run, b0, b1);
    }
    for (auto& th : pool) th.join();
  }

  std::int64_t total = 0;
  for (auto h : hits) total += h;
  double p = static_cast<double>(total) / static_cast<double>(samples);

  BadShellReport rep;
  rep.s = s;
  rep.samples = samples;
  rep.estimate = box_area * p;
  rep.std_error = box_area * std::sqrt(p * (1 - p) / static_cast<double>(samples));
  rep.mu_value = gs.mu();
  rep.theta_bar = d.theta(s).theta_bar;
  double P = d.perimeter();
  double rin = d.kind() == DomainKind::disk ? d.disk_radius() : d.summary().inradius;
  rep.bound_general = 2 * s * (rep.mu_value + rep.theta_bar + gp.eps * gp.eps) * P;
  rep.bound_convex_unit = P * s * gp.r / (gp.eps * rin);
  rep.ratio_convex = rep.estimate / rep.bound_convex_unit;
  return rep;
}

ProximityReport check_vertex_proximity(const Domain& d, const GoodParams& gp,
                                       std::int64_t samples, std::uint64_t seed) {
  validate(gp);
  if (gp.eps > 0.5)
    throw std::invalid_argument("apex pinning is only claimed for eps <= 1/2");
  GoodSet gs = good_set(d, gp);

  ProximityReport rep;
  rep.worst_sharp = std::numeric_limits<double>::infinity();

  // flattened good arcs, slightly shrunk so sampled points are strictly good
  struct Arc {
    int edge;
    double a, b, cum;  // cum = total length before this arc
  };
  std::vector<Arc> arcs;
  double L = 0;
  if (d.kind() == DomainKind::disk) {
    if (gs.disk_good) {
      arcs.push_back({-1, 0, gs.total_length, 0});
      L = gs.total_length;
    }
  } else {
    double shrink = 2e-12 * gs.total_length;
    for (int e = 0; e < static_cast<int>(gs.per_edge.size()); ++e) {
      for (const auto& iv : gs.per_edge[e]) {
        double a = iv.first + shrink, b = iv.second - shrink;
        if (b <= a) continue;
        arcs.push_back({e, a, b, L});
        L += b - a;
      }
    }
  }
  if (arcs.empty()) return rep;

  double scale = domain_scale(d);
  double half_angle = std::asin(gp.eps);
  double sharp = 1 - 2 * gp.eps * gp.eps;
  double R = d.disk_radius();

  for (std::int64_t i = 0; i < samples; ++i) {
    auto idx = static_cast<std::uint64_t>(i);
    double ell = rng::u01(seed, rng::streams::proximity_arc, idx) * L;
    std::size_t k = arcs.size() - 1;
    for (std::size_t j = 1; j < arcs.size(); ++j) {
      if (arcs[j].cum > ell) {
        k = j - 1;
        break;
      }
    }
    double s = arcs[k].a + (ell - arcs[k].cum);
    s = std::min(s, arcs[k].b);

    Vec2 p, nu, tangent;
    if (d.kind() == DomainKind::disk) {
      double phi = s / R;
      p = {R * std::cos(phi), R * std::sin(phi)};
      nu = (-1.0 / R) * p;
      tangent = {-std::sin(phi), std::cos(phi)};
    } else {
      auto f = edge_frame(d, arcs[k].edge);
      p = f.A + s * f.tangent;
      nu = f.nu;
      tangent = f.tangent;
    }

    double theta = (2 * rng::u01(seed, rng::streams::proximity_angle, idx) - 1) *
                   half_angle * (1 - 1e-9);
    double rho = 0.5 * gp.r * std::sqrt(rng::u01(seed, rng::streams::proximity_radius, idx));
    rho = std::clamp(rho, 1e-9 * gp.r, 0.5 * gp.r * (1 - 1e-9));
    double side = rng::u01(seed, rng::streams::proximity_side, idx) < 0.5 ? 1.0 : -1.0;

    Vec2 dir = (side * std::cos(theta)) * nu + std::sin(theta) * tangent;
    Vec2 u = p + rho * dir;
    double dist = std::abs(d.signed_distance(u));

    ++rep.samples;
    double factor = rho / std::max(dist, 1e-300);
    rep.worst_factor = std::max(rep.worst_factor, factor);
    if (rho > 2 * dist + 1e-12 * scale) ++rep.violations_factor2;
    rep.worst_sharp = std::min(rep.worst_sharp, dist / rho);
    if (dist < sharp * rho - 1e-12 * scale) ++rep.violations_sharp;
  }
  return rep;
}

}  // namespace weyl_lab::brown
