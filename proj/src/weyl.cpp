#include <weyl_lab/weyl.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace weyl_lab::weyl {

namespace {

constexpr double kPi = std::numbers::pi_v<double>;

double riesz1_exact(const std::vector<double>& ev, double lambda) {
  long double acc = 0;
  for (double e : ev) {
    if (e >= lambda) break;
    acc += static_cast<long double>(lambda) - e;
  }
  return static_cast<double>(acc);
}

void require_sorted_spectrum(const std::vector<double>& ev) {
  if (!std::is_sorted(ev.begin(), ev.end()))
    throw std::invalid_argument("spectrum must be sorted ascending");
}

// median of a small scratch vector; averages the middle pair for even sizes
double median_of(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  auto n = v.size();
  if (n == 0) return 0;
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <class Value>
std::vector<DecadeStat> decade_stats(const std::vector<double>& lambdas, Value value) {
  std::vector<DecadeStat> out;
  if (lambdas.empty()) return out;
  int lo_exp = static_cast<int>(std::floor(std::log10(lambdas.front()) + 1e-9));
  int hi_exp = static_cast<int>(std::ceil(std::log10(lambdas.back()) - 1e-9));
  for (int e = lo_exp; e < hi_exp; ++e) {
    DecadeStat st;
    st.lo = std::pow(10.0, e);
    st.hi = std::pow(10.0, e + 1);
    std::vector<double> vals;
    for (std::size_t i = 0; i < lambdas.size(); ++i)
      if (lambdas[i] >= st.lo && lambdas[i] < st.hi) vals.push_back(value(i));
    st.count = static_cast<int>(vals.size());
    if (st.count == 0) continue;
    st.max = *std::max_element(vals.begin(), vals.end());
    st.median = median_of(vals);
    out.push_back(st);
  }
  return out;
}

// least-squares slope of log(value) vs log(lambda) over the top two decades
double fit_top_slope(const std::vector<double>& lambdas, const std::vector<double>& values) {
  double floor_lambda = lambdas.back() / 100.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (lambdas[i] < floor_lambda || values[i] <= 0) continue;
    double x = std::log(lambdas[i]);
    double y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("not enough points in the top decades to fit a slope");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void validate_grid(const std::vector<double>& grid, double cutoff) {
  if (grid.empty()) throw std::invalid_argument("lambda grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0)) throw std::invalid_argument("lambda grid must be positive");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw std::invalid_argument("lambda grid must be strictly increasing");
  }
  if (grid.back() > cutoff)
    throw std::invalid_argument("lambda grid exceeds the spectrum cutoff");
}

}  // namespace

double WeylConstants::riesz_gamma(double gamma) const {
  if (!(gamma >= 0)) throw std::invalid_argument("gamma must be nonnegative");
  return std::tgamma(gamma + 1) /
         (std::pow(4 * kPi, dim / 2.0) * std::tgamma(gamma + 1 + dim / 2.0));
}

WeylConstants constants(int dim) {
  if (dim < 1 || dim > 16) throw std::invalid_argument("dimension must be in [1, 16]");
  WeylConstants c;
  c.dim = dim;
  c.ball_volume = std::pow(kPi, dim / 2.0) / std::tgamma(1 + dim / 2.0);
  c.riesz1 = (2.0 / (2.0 + dim)) * c.ball_volume / std::pow(2 * kPi, dim);
  return c;
}

double two_term_riesz(const geometry::GeometrySummary& s, double lambda) {
  if (!(lambda >= 0)) throw std::invalid_argument("lambda must be nonnegative");
  double bulk = constants(2).riesz1 * s.area * lambda * lambda;
  double boundary = 0.25 * constants(1).riesz1 * s.perimeter * std::pow(lambda, 1.5);
  return bulk - boundary;
}

RemainderSeries remainder_series(const std::vector<double>& ev, double cutoff,
                                 const geometry::GeometrySummary& s,
                                 const std::vector<double>& grid, int terms) {
  require_sorted_spectrum(ev);
  validate_grid(grid, cutoff);
  if (terms != 1 && terms != 2)
    throw std::invalid_argument("prediction must use one or two terms");

  RemainderSeries out;
  out.points.reserve(grid.size());
  double bulk_coeff = constants(2).riesz1 * s.area;
  double boundary_coeff = terms == 2 ? 0.25 * constants(1).riesz1 * s.perimeter : 0.0;
  for (double lam : grid) {
    RemainderPoint pt;
    pt.lambda = lam;
    pt.riesz = riesz1_exact(ev, lam);
    pt.prediction = bulk_coeff * lam * lam - boundary_coeff * std::pow(lam, 1.5);
    pt.remainder = pt.riesz - pt.prediction;
    pt.normalized = std::abs(pt.remainder) / std::pow(lam, 1.5);
    out.points.push_back(pt);
  }

  std::vector<double> lambdas(grid);
  out.decades = decade_stats(lambdas, [&](std::size_t i) { return out.points[i].normalized; });

  std::vector<double> absR(out.points.size());
  for (std::size_t i = 0; i < out.points.size(); ++i) absR[i] = std::abs(out.points[i].remainder);
  out.slope = fit_top_slope(lambdas, absR);
  return out;
}

std::vector<double> midpoint_log_grid(const std::vector<double>& ev, double lo, double hi,
                                      int per_decade) {
  require_sorted_spectrum(ev);
  if (!(0 < lo && lo < hi)) throw std::invalid_argument("need 0 < lo < hi");
  if (per_decade < 1) throw std::invalid_argument("per_decade must be positive");
  double decades = std::log10(hi / lo);
  int npts = static_cast<int>(std::lround(decades * per_decade)) + 1;
  std::vector<double> out;
  for (int i = 0; i < npts; ++i) {
    double t = lo * std::pow(hi / lo, npts == 1 ? 0.0 : static_cast<double>(i) / (npts - 1));
    auto it = std::upper_bound(ev.begin(), ev.end(), t);
    if (it == ev.begin() || it == ev.end()) continue;
    double mid = 0.5 * (*(it - 1) + *it);
    if (*(it - 1) < mid && mid < *it && mid >= lo && mid <= hi) out.push_back(mid);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

AizenmanLiebCheck check_aizenman_lieb(const std::vector<double>& ev, double cutoff,
                                      double lambda, int gamma1, int gamma2) {
  require_sorted_spectrum(ev);
  if (!(lambda >= 0)) throw std::invalid_argument("lambda must be nonnegative");
  if (lambda > cutoff)
    throw std::invalid_argument("lambda exceeds the spectrum cutoff; the tail is missing");
  bool step_pair = gamma1 == 0 && gamma2 == 1;
  bool linear_pair = gamma1 == 1 && gamma2 == 2;
  if (!step_pair && !linear_pair)
    throw std::invalid_argument("supported order pairs are (0,1) and (1,2)");

  AizenmanLiebCheck chk;
  chk.lambda = lambda;

  long double direct = 0;
  for (double e : ev) {
    if (e >= lambda) break;
    long double gap = static_cast<long double>(lambda) - e;
    direct += step_pair ? gap : gap * gap;
  }
  chk.direct = static_cast<double>(direct);

  // partition [0, lambda] at the eigenvalues below lambda; on each cell the
  // order-gamma1 mean is a polynomial of degree gamma1, so the Beta-weighted
  // integral is a finite sum (rectangle rule for steps, trapezoid for the
  // piecewise-linear first-order mean), exact up to round-off
  std::vector<double> cuts{0.0};
  for (double e : ev) {
    if (e >= lambda) break;
    if (e > 0) cuts.push_back(e);
  }
  cuts.push_back(lambda);

  long double integral = 0;
  if (step_pair) {
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j)
      integral += static_cast<long double>(j) * (static_cast<long double>(cuts[j + 1]) - cuts[j]);
    chk.integrated = static_cast<double>(integral);
  } else {
    long double partial = 0;  // sum of eigenvalues below the current cell
    auto mean1 = [&](long double t, std::size_t k) { return k * t - partial; };
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
      if (j > 0) partial += cuts[j];
      long double a = cuts[j], b = cuts[j + 1];
      integral += 0.5L * (mean1(a, j) + mean1(b, j)) * (b - a);
    }
    chk.integrated = static_cast<double>(2.0L * integral);
  }
  chk.residual = std::abs(chk.direct - chk.integrated);
  return chk;
}

ConvexBoundReport check_universal_convex_bound(const std::vector<double>& ev, double cutoff,
                                               const geometry::GeometrySummary& s,
                                               const std::vector<double>& grid) {
  require_sorted_spectrum(ev);
  validate_grid(grid, cutoff);
  if (!(s.perimeter > 0) || !(s.inradius > 0))
    throw std::invalid_argument("domain summary must have positive perimeter and inradius");

  ConvexBoundReport rep;
  rep.rows.reserve(grid.size());
  double bulk_coeff = constants(2).riesz1 * s.area;
  double boundary_coeff = 0.25 * constants(1).riesz1 * s.perimeter;
  for (double lam : grid) {
    ConvexBoundRow row;
    row.lambda = lam;
    double prediction = bulk_coeff * lam * lam - boundary_coeff * std::pow(lam, 1.5);
    row.remainder = riesz1_exact(ev, lam) - prediction;
    double envelope = s.perimeter * std::pow(lam, 1.5) *
                      std::pow(s.inradius * std::sqrt(lam), -1.0 / 11.0);
    row.q = std::abs(row.remainder) / envelope;
    rep.fitted_c = std::max(rep.fitted_c, row.q);
    rep.rows.push_back(row);
  }

  rep.decades = decade_stats(grid, [&](std::size_t i) { return rep.rows[i].q; });
  if (rep.decades.empty()) throw std::invalid_argument("grid spans no complete decade");
  double first = rep.decades.front().max;
  for (const auto& d : rep.decades)
    rep.decade_ratio = std::max(rep.decade_ratio, first > 0 ? d.max / first : 0.0);
  rep.bounded = rep.decade_ratio <= 1.5;
  return rep;
}

}  // namespace weyl_lab::weyl
