#include "weyl_lab/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "weyl_lab/io.hpp"
#include "weyl_lab/rng.hpp"

namespace weyl_lab::geometry {

namespace {

constexpr double kPi = 3.14159265358979323846;

double clamp01(double v) { return v < 0 ? 0 : (v > 1 ? 1 : v); }

// distance^2 from p to segment [a,b] and the clamped parameter
std::pair<double, double> segment_dist2(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 d = b - a;
  double len2 = norm2(d);
  double s = len2 > 0 ? clamp01(dot(p - a, d) / len2) : 0.0;
  Vec2 q = a + s * d;
  return {norm2(p - q), s};
}

struct Tok {
  std::string_view text;
  int column;  // 1-based byte offset in the record
};

std::vector<Tok> tokenize(std::string_view text) {
  std::vector<Tok> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    out.push_back({text.substr(i, j - i), static_cast<int>(i + 1)});
    i = j;
  }
  return out;
}

double parse_number(const Tok& tok, const char* what) {
  double v = 0;
  auto res = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.text.data() + tok.text.size() ||
      !std::isfinite(v)) {
    throw ParseError(std::string("expected ") + what + ", got '" +
                         std::string(tok.text) + "'",
                     tok.column);
  }
  return v;
}

}  // namespace

ParseError::ParseError(const std::string& msg, int col)
    : std::invalid_argument(msg + " (column " + std::to_string(col) + ")"),
      column(col) {}

Domain Domain::rectangle(double a, double b) {
  if (!(a > 0) || !(b > 0) || !std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("rectangle: sides must be positive finite");
  Domain d;
  d.kind_ = DomainKind::rectangle;
  d.rect_a_ = a;
  d.rect_b_ = b;
  d.verts_ = {{0, 0}, {a, 0}, {a, b}, {0, b}};
  d.finish_polygon(false);
  d.inradius_ = 0.5 * std::min(a, b);
  return d;
}

Domain Domain::convex_polygon(std::vector<Vec2> vertices) {
  Domain d;
  d.kind_ = DomainKind::convex_polygon;
  d.verts_ = std::move(vertices);
  d.finish_polygon(true);
  d.inradius_ = d.chebyshev_inradius(&d.incenter_);
  return d;
}

Domain Domain::disk(double radius) {
  if (!(radius > 0) || !std::isfinite(radius))
    throw std::invalid_argument("disk: radius must be positive finite");
  Domain d;
  d.kind_ = DomainKind::disk;
  d.radius_ = radius;
  d.area_ = kPi * radius * radius;
  d.perimeter_ = 2 * kPi * radius;
  d.bbox_ = {{-radius, -radius}, {radius, radius}};
  d.inradius_ = radius;
  return d;
}

void Domain::finish_polygon(bool validate) {
  auto& v = verts_;
  // drop consecutive duplicates
  std::vector<Vec2> clean;
  for (const auto& p : v) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw std::invalid_argument("polygon: non-finite vertex");
    if (clean.empty() || norm2(p - clean.back()) > 1e-28) clean.push_back(p);
  }
  if (clean.size() > 1 && norm2(clean.front() - clean.back()) <= 1e-28) clean.pop_back();
  v = std::move(clean);
  if (v.size() < 3) throw std::invalid_argument("polygon: needs at least 3 distinct vertices");

  double twice_area = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % v.size()];
    twice_area += cross(a, b);
  }
  if (twice_area < 0) {
    std::reverse(v.begin(), v.end());
    twice_area = -twice_area;
  }
  if (validate) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      Vec2 e0 = v[(i + 1) % v.size()] - v[i];
      Vec2 e1 = v[(i + 2) % v.size()] - v[(i + 1) % v.size()];
      if (!(cross(e0, e1) > 0))
        throw std::invalid_argument("polygon: vertex " + std::to_string((i + 1) % v.size()) +
                                    " is reflex or collinear");
    }
  }

  area_ = 0.5 * twice_area;
  perimeter_ = 0;
  edge_normals_.clear();
  edge_offsets_.clear();
  edge_lengths_.clear();
  bbox_.lo = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  bbox_.hi = {-std::numeric_limits<double>::max(), -std::numeric_limits<double>::max()};
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % v.size()];
    Vec2 d = b - a;
    double len = norm(d);
    perimeter_ += len;
    Vec2 n = normalized(perp(d));  // CCW: +90 degrees points inward
    edge_normals_.push_back(n);
    edge_offsets_.push_back(dot(n, a));
    edge_lengths_.push_back(len);
    bbox_.lo.x = std::min(bbox_.lo.x, a.x);
    bbox_.lo.y = std::min(bbox_.lo.y, a.y);
    bbox_.hi.x = std::max(bbox_.hi.x, a.x);
    bbox_.hi.y = std::max(bbox_.hi.y, a.y);
  }
}

// Chebyshev center: maximize r subject to n_i . x - r >= c_i. With three
// unknowns the optimum sits where three constraints are tight, so enumerate
// all triples, solve the 3x3 system, and keep the best feasible candidate.
double Domain::chebyshev_inradius(Vec2* center) const {
  if (kind_ == DomainKind::disk) {
    if (center) *center = {0, 0};
    return radius_;
  }
  if (kind_ == DomainKind::rectangle) {
    if (center) *center = {0.5 * rect_a_, 0.5 * rect_b_};
    return 0.5 * std::min(rect_a_, rect_b_);
  }
  const std::size_t m = edge_normals_.size();
  const double scale = bbox_.max_side();
  const double feas_tol = 1e-9 * scale;
  double best_r = -1;
  Vec2 best_x{};
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      for (std::size_t k = j + 1; k < m; ++k) {
        // rows: n.x * x + n.y * y - r = c
        const Vec2 ni = edge_normals_[i], nj = edge_normals_[j], nk = edge_normals_[k];
        const double ci = edge_offsets_[i], cj = edge_offsets_[j], ck = edge_offsets_[k];
        double det = ni.x * (nj.y * (-1) - (-1) * nk.y) -
                     ni.y * (nj.x * (-1) - (-1) * nk.x) +
                     (-1) * (nj.x * nk.y - nj.y * nk.x);
        if (std::abs(det) < 1e-12) continue;
        // Cramer
        double dx = ci * (nj.y * (-1) + nk.y) - ni.y * (cj * (-1) + ck) +
                    (-1) * (cj * nk.y - nj.y * ck);
        double dy = ni.x * (cj * (-1) + ck) - ci * (nj.x * (-1) + nk.x) +
                    (-1) * (nj.x * ck - cj * nk.x);
        double dr = ni.x * (nj.y * ck - cj * nk.y) - ni.y * (nj.x * ck - cj * nk.x) +
                    ci * (nj.x * nk.y - nj.y * nk.x);
        Vec2 x{dx / det, dy / det};
        double r = dr / det;
        if (!(r > best_r)) continue;
        bool feasible = true;
        for (std::size_t e = 0; e < m; ++e) {
          if (dot(edge_normals_[e], x) - r < edge_offsets_[e] - feas_tol) {
            feasible = false;
            break;
          }
        }
        if (feasible) {
          best_r = r;
          best_x = x;
        }
      }
  if (best_r <= 0) throw std::runtime_error("inradius: no feasible Chebyshev center found");
  if (center) *center = best_x;
  return best_r;
}

Domain Domain::parse(std::string_view text) {
  auto toks = tokenize(text);
  if (toks.empty()) throw ParseError("empty domain record", 1);
  std::string_view kind = toks[0].text;
  if (kind == "rect") {
    if (toks.size() != 3)
      throw ParseError("rect takes exactly 2 numbers",
                       toks.size() > 3 ? toks[3].column : toks[0].column);
    return rectangle(parse_number(toks[1], "width"), parse_number(toks[2], "height"));
  }
  if (kind == "disk") {
    if (toks.size() != 2)
      throw ParseError("disk takes exactly 1 number",
                       toks.size() > 2 ? toks[2].column : toks[0].column);
    return disk(parse_number(toks[1], "radius"));
  }
  if (kind == "poly") {
    if (toks.size() < 7 || (toks.size() - 1) % 2 != 0)
      throw ParseError("poly takes an even number (>= 6) of coordinates",
                       toks.back().column);
    std::vector<Vec2> pts;
    for (std::size_t i = 1; i + 1 < toks.size(); i += 2)
      pts.push_back({parse_number(toks[i], "x coordinate"),
                     parse_number(toks[i + 1], "y coordinate")});
    return convex_polygon(std::move(pts));
  }
  throw ParseError("unknown domain kind '" + std::string(kind) + "'", toks[0].column);
}

std::string Domain::serialize() const {
  switch (kind_) {
    case DomainKind::rectangle:
      return "rect " + io::fmt(rect_a_) + " " + io::fmt(rect_b_);
    case DomainKind::disk:
      return "disk " + io::fmt(radius_);
    case DomainKind::convex_polygon: {
      std::string s = "poly";
      for (const auto& v : verts_) s += " " + io::fmt(v.x) + " " + io::fmt(v.y);
      return s;
    }
  }
  return {};
}

double Domain::signed_distance(Vec2 p) const {
  if (kind_ == DomainKind::disk) return radius_ - norm(p);
  // inside a convex polygon the distance to the boundary is the smallest
  // distance to the supporting lines; outside it is the distance to the
  // nearest edge segment
  double min_line = std::numeric_limits<double>::max();
  bool inside = true;
  for (std::size_t i = 0; i < edge_normals_.size(); ++i) {
    double s = dot(edge_normals_[i], p) - edge_offsets_[i];
    min_line = std::min(min_line, s);
    if (s < 0) inside = false;
  }
  if (inside) return min_line;
  double d2 = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < verts_.size(); ++i) {
    d2 = std::min(d2, segment_dist2(p, verts_[i], verts_[(i + 1) % verts_.size()]).first);
  }
  return -std::sqrt(d2);
}

BoundaryProjection Domain::project_boundary(Vec2 p) const {
  BoundaryProjection out;
  if (kind_ == DomainKind::disk) {
    double r = norm(p);
    if (r == 0) {
      out.point = {radius_, 0};
      out.dist = radius_;
      out.inward_normal = {-1, 0};
      out.feature_gap = 0;  // the center sees the whole circle
      return out;
    }
    Vec2 u = {p.x / r, p.y / r};
    out.point = radius_ * u;
    out.dist = std::abs(radius_ - r);
    out.inward_normal = {-u.x, -u.y};
    out.feature_gap = r;  // distance to the medial point at the origin
    return out;
  }
  struct Cand {
    double d2;
    Vec2 q;
    int edge;
    double s;  // arclength along the edge
  };
  std::vector<Cand> cands;
  cands.reserve(verts_.size());
  for (std::size_t i = 0; i < verts_.size(); ++i) {
    Vec2 a = verts_[i], b = verts_[(i + 1) % verts_.size()];
    auto [d2, s] = segment_dist2(p, a, b);
    cands.push_back({d2, a + s * (b - a), static_cast<int>(i), s * edge_lengths_[i]});
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.d2 < b.d2; });
  const Cand& best = cands[0];
  out.dist = std::sqrt(best.d2);
  out.point = best.q;
  const double scale = bbox_.max_side();
  const double vtx_tol = 1e-12 * scale;
  if (best.s <= vtx_tol) {
    out.vertex = best.edge;
  } else if (best.s >= edge_lengths_[best.edge] - vtx_tol) {
    out.vertex = (best.edge + 1) % static_cast<int>(verts_.size());
  } else {
    out.edge = best.edge;
    out.s = best.s;
  }
  // inward normal: direction of increasing signed distance at p
  if (out.dist > vtx_tol) {
    Vec2 dir = (1.0 / out.dist) * (p - out.point);
    out.inward_normal = signed_distance(p) >= 0 ? dir : Vec2{-dir.x, -dir.y};
  } else if (out.edge >= 0) {
    out.inward_normal = edge_normals_[out.edge];
  } else {
    out.inward_normal = {0, 0};
  }
  // gap to the nearest feature with a genuinely different foot point
  out.feature_gap = std::numeric_limits<double>::max();
  for (std::size_t i = 1; i < cands.size(); ++i) {
    if (norm2(cands[i].q - best.q) > 1e-18 * scale * scale) {
      out.feature_gap = std::sqrt(cands[i].d2) - out.dist;
      break;
    }
  }
  return out;
}

GeometrySummary Domain::summary() const {
  GeometrySummary s;
  s.area = area_;
  s.perimeter = perimeter_;
  s.bbox = bbox_;
  s.vertex_count = kind_ == DomainKind::disk ? 0 : static_cast<int>(verts_.size());
  if (inradius_ > 0) {
    s.inradius = inradius_;
    s.incenter = incenter_;
    if (kind_ == DomainKind::rectangle) s.incenter = {0.5 * rect_a_, 0.5 * rect_b_};
    if (kind_ == DomainKind::disk) s.incenter = {0, 0};
  } else {
    Vec2 c;
    s.inradius = chebyshev_inradius(&c);
    s.incenter = c;
  }
  return s;
}

Domain Domain::inner_parallel_set(double t) const {
  if (kind_ == DomainKind::disk)
    throw std::invalid_argument("inner_parallel_set: only polygons and rectangles");
  if (t < 0 || !std::isfinite(t)) throw std::invalid_argument("inner_parallel_set: t must be >= 0");
  if (t == 0) return *this;
  if (kind_ == DomainKind::rectangle) {
    if (2 * t >= std::min(rect_a_, rect_b_))
      throw std::invalid_argument("inner_parallel_set: t >= inradius");
    return rectangle(rect_a_ - 2 * t, rect_b_ - 2 * t);
  }
  // intersection of the inward-offset half-planes n_i . x >= c_i + t
  const std::size_t m = edge_normals_.size();
  const double scale = bbox_.max_side();
  const double feas_tol = 1e-9 * scale;
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      double det = cross(edge_normals_[i], edge_normals_[j]);
      if (std::abs(det) < 1e-12) continue;
      double bi = edge_offsets_[i] + t, bj = edge_offsets_[j] + t;
      Vec2 x{(bi * edge_normals_[j].y - edge_normals_[i].y * bj) / det,
             (edge_normals_[i].x * bj - bi * edge_normals_[j].x) / det};
      bool ok = true;
      for (std::size_t e = 0; e < m; ++e) {
        if (dot(edge_normals_[e], x) < edge_offsets_[e] + t - feas_tol) {
          ok = false;
          break;
        }
      }
      if (ok) pts.push_back(x);
    }
  // dedupe
  std::vector<Vec2> uniq;
  for (const auto& p : pts) {
    bool dup = false;
    for (const auto& q : uniq)
      if (norm2(p - q) < 1e-18 * scale * scale) {
        dup = true;
        break;
      }
    if (!dup) uniq.push_back(p);
  }
  if (uniq.size() < 3)
    throw std::invalid_argument("inner_parallel_set: t >= inradius (offset set degenerate)");
  Vec2 c{0, 0};
  for (const auto& p : uniq) c = c + (1.0 / uniq.size()) * p;
  std::sort(uniq.begin(), uniq.end(), [&](Vec2 a, Vec2 b) {
    return std::atan2(a.y - c.y, a.x - c.x) < std::atan2(b.y - c.y, b.x - c.x);
  });
  Domain d;
  d.kind_ = DomainKind::convex_polygon;
  d.verts_ = std::move(uniq);
  d.finish_polygon(false);
  return d;
}

double Domain::shell_volume(double t, Side side) const {
  if (!(t > 0) || !std::isfinite(t)) throw std::invalid_argument("shell_volume: t must be > 0");
  const double rin = inradius_ > 0 ? inradius_ : chebyshev_inradius(nullptr);
  if (t > rin * (1 + 1e-12)) throw std::invalid_argument("shell_volume: t exceeds inradius");
  switch (kind_) {
    case DomainKind::disk:
      return side == Side::inner ? kPi * (radius_ * radius_ - (radius_ - t) * (radius_ - t))
                                 : kPi * ((radius_ + t) * (radius_ + t) - radius_ * radius_);
    case DomainKind::rectangle:
      return side == Side::inner
                 ? area_ - (rect_a_ - 2 * t) * (rect_b_ - 2 * t)
                 : perimeter_ * t + kPi * t * t;
    case DomainKind::convex_polygon: {
      if (side == Side::outer) return perimeter_ * t + kPi * t * t;
      try {
        return area_ - inner_parallel_set(t).area();
      } catch (const std::invalid_argument&) {
        return area_;  // t == inradius: the offset set has measure zero
      }
    }
  }
  return 0;
}

MonteCarloEstimate Domain::shell_volume_mc(double t, Side side, std::uint64_t seed,
                                           std::int64_t samples, int threads) const {
  if (!(t > 0)) throw std::invalid_argument("shell_volume_mc: t must be > 0");
  if (samples < 1000) throw std::invalid_argument("shell_volume_mc: too few samples");
  BBox box = side == Side::inner ? bbox_ : bbox_.expanded(t);
  const std::int64_t block = 8192;
  const std::int64_t nblocks = (samples + block - 1) / block;
  std::vector<std::int64_t> hits(static_cast<std::size_t>(nblocks), 0);
  auto work = [&](std::int64_t b0, std::int64_t b1) {
    for (std::int64_t b = b0; b < b1; ++b) {
      std::int64_t lo = b * block, hi = std::min(samples, (b + 1) * block);
      std::int64_t h = 0;
      for (std::int64_t i = lo; i < hi; ++i) {
        Vec2 p{rng::uniform(seed, rng::streams::shell_x, static_cast<std::uint64_t>(i),
                            box.lo.x, box.hi.x),
               rng::uniform(seed, rng::streams::shell_y, static_cast<std::uint64_t>(i),
                            box.lo.y, box.hi.y)};
        double sd = signed_distance(p);
        bool in_shell = side == Side::inner ? (sd > 0 && sd < t) : (sd <= 0 && sd > -t);
        if (in_shell) ++h;
      }
      hits[static_cast<std::size_t>(b)] = h;
    }
  };
  threads = std::max(1, threads);
  if (threads == 1) {
    work(0, nblocks);
  } else {
    std::vector<std::thread> pool;
    std::int64_t per = (nblocks + threads - 1) / threads;
    for (int tid = 0; tid < threads; ++tid) {
      std::int64_t b0 = tid * per, b1 = std::min<std::int64_t>(nblocks, b0 + per);
      if (b0 >= b1) break;
      pool.emplace_back(work, b0, b1);
    }
    for (auto& th : pool) th.join();
  }
  std::int64_t total = 0;
  for (auto h : hits) total += h;
  double p_hat = static_cast<double>(total) / static_cast<double>(samples);
  MonteCarloEstimate est;
  est.samples = samples;
  est.value = p_hat * box.area();
  est.std_error = box.area() * std::sqrt(p_hat * (1 - p_hat) / static_cast<double>(samples));
  return est;
}

ThetaReport Domain::theta(double t) const {
  ThetaReport rep;
  rep.t = t;
  rep.shell_inner = shell_volume(t, Side::inner);
  rep.shell_outer = shell_volume(t, Side::outer);
  rep.theta_inner = rep.shell_inner / (t * perimeter_) - 1.0;
  rep.theta_outer = rep.shell_outer / (t * perimeter_) - 1.0;
  // suprema over a geometric grid reaching six decades below t
  double sup_in = 0, sup_out = 0;
  for (double tp : geometric_grid(t * 1e-6, t, 64)) {
    double vi = shell_volume(tp, Side::inner) / (tp * perimeter_) - 1.0;
    double vo = shell_volume(tp, Side::outer) / (tp * perimeter_) - 1.0;
    sup_in = std::max(sup_in, std::abs(vi));
    sup_out = std::max(sup_out, std::abs(vo));
  }
  rep.theta_bar = 0.5 * (sup_in + sup_out);
  return rep;
}

ConvexBoundsReport Domain::check_convex_bounds(const std::vector<double>& ts) const {
  ConvexBoundsReport rep;
  GeometrySummary s = summary();
  rep.area = s.area;
  rep.perimeter = s.perimeter;
  rep.inradius = s.inradius;
  rep.inradius_lower = s.area / s.perimeter;
  rep.inradius_upper = 2.0 * s.area / s.perimeter;
  const double rtol = 1e-10;
  rep.inradius_ok = s.inradius >= rep.inradius_lower * (1 - rtol) &&
                    s.inradius <= rep.inradius_upper * (1 + rtol);
  rep.all_ok = rep.inradius_ok;
  for (double t : ts) {
    ConvexBoundsRow row;
    row.t = t;
    if (kind_ == DomainKind::disk) {
      row.offset_perimeter = 2 * kPi * (radius_ - t);
    } else {
      row.offset_perimeter = inner_parallel_set(t).perimeter();
    }
    row.lower = s.perimeter * (1.0 - t / s.inradius);
    row.upper = s.perimeter;
    row.ok = row.offset_perimeter <= row.upper * (1 + rtol) &&
             row.offset_perimeter >= row.lower - rtol * s.perimeter;
    rep.all_ok = rep.all_ok && row.ok;
    rep.rows.push_back(row);
  }
  return rep;
}

std::vector<double> geometric_grid(double t_min, double t_max, int per_decade) {
  if (!(t_min > 0) || !(t_max > t_min)) throw std::invalid_argument("geometric_grid: bad range");
  double decades = std::log10(t_max / t_min);
  int n = std::max(2, static_cast<int>(std::ceil(decades * per_decade)) + 1);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] =
        t_min * std::pow(t_max / t_min, static_cast<double>(i) / (n - 1));
  out.back() = t_max;
  return out;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {  // lower hull
    while (k >= 2 && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {  // upper hull
    while (k >= t && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

Domain random_convex_polygon(std::uint64_t seed, int npts) {
  if (npts < 3) throw std::invalid_argument("random_convex_polygon: npts >= 3");
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(npts));
    for (int i = 0; i < npts; ++i) {
      std::uint64_t idx = static_cast<std::uint64_t>(attempt) * 4096u + static_cast<std::uint64_t>(i);
      pts.push_back({rng::u01(seed, rng::streams::polygon_x, idx),
                     rng::u01(seed, rng::streams::polygon_y, idx)});
    }
    auto hull = convex_hull(std::move(pts));
    if (hull.size() < 3) continue;
    Domain d = Domain::convex_polygon(hull);
    if (d.area() > 1e-3) return d;
  }
  throw std::runtime_error("random_convex_polygon: could not build a usable hull");
}

}  // namespace weyl_lab::geometry
