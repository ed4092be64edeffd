#include "weyl_lab/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "weyl_lab/bessel.hpp"
#include "weyl_lab/rng.hpp"

namespace weyl_lab::spectral {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::vector<double> exact_rectangle_spectrum(double a, double b, double cutoff) {
  if (!(a > 0) || !(b > 0)) throw std::invalid_argument("rectangle sides must be positive");
  std::vector<double> ev;
  if (!(cutoff > 0)) return ev;
  double p2 = kPi * kPi;
  for (long m = 1;; ++m) {
    double base = p2 * static_cast<double>(m) * static_cast<double>(m) / (a * a);
    if (base > cutoff) break;
    for (long k = 1;; ++k) {
      double lam = base + p2 * static_cast<double>(k) * static_cast<double>(k) / (b * b);
      if (lam > cutoff) break;
      ev.push_back(lam);
    }
  }
  std::sort(ev.begin(), ev.end());
  return ev;
}

std::vector<double> exact_disk_spectrum(double radius, double cutoff) {
  if (!(radius > 0)) throw std::invalid_argument("radius must be positive");
  std::vector<double> ev;
  if (!(cutoff > 0)) return ev;
  auto rows = bessel::zero_table(radius * std::sqrt(cutoff));
  for (std::size_t n = 0; n < rows.size(); ++n) {
    for (double z : rows[n]) {
      double lam = (z / radius) * (z / radius);
      if (lam > cutoff) continue;
      ev.push_back(lam);
      if (n >= 1) ev.push_back(lam);
    }
  }
  std::sort(ev.begin(), ev.end());
  return ev;
}

double counting(const std::vector<double>& ev, double lambda, TieFlag* flag) {
  auto it = std::upper_bound(ev.begin(), ev.end(), lambda);
  if (flag) {
    *flag = {};
    double nearest = std::numeric_limits<double>::infinity();
    if (it != ev.end()) nearest = std::min(nearest, std::abs(*it - lambda));
    if (it != ev.begin()) nearest = std::min(nearest, std::abs(*(it - 1) - lambda));
    flag->gap = nearest / std::max(std::abs(lambda), 1e-300);
    flag->tie = flag->gap <= 1e-12;
  }
  return static_cast<double>(it - ev.begin());
}

double riesz_mean(const std::vector<double>& ev, double gamma, double lambda) {
  if (gamma < 0) throw std::invalid_argument("gamma must be nonnegative");
  long double sum = 0;
  for (double e : ev) {
    if (e >= lambda) break;
    sum += gamma == 0 ? 1.0L : static_cast<long double>(std::pow(lambda - e, gamma));
  }
  return static_cast<double>(sum);
}

Discretization discretize(const geometry::Domain& d, int n) {
  if (n < 1) throw std::invalid_argument("need n >= 1");
  Discretization g;
  auto box = d.bbox();
  g.h = box.max_side() / (n + 1);
  g.origin = box.lo;
  g.nx = static_cast<int>(std::floor((box.width() - 1e-12 * box.max_side()) / g.h));
  g.ny = static_cast<int>(std::floor((box.height() - 1e-12 * box.max_side()) / g.h));
  if (g.nx < 1 || g.ny < 1) throw std::invalid_argument("grid too coarse for this domain");

  g.node_id.assign(static_cast<std::size_t>(g.nx) * g.ny, -1);
  std::int32_t id = 0;
  for (int j = 1; j <= g.ny; ++j) {
    for (int i = 1; i <= g.nx; ++i) {
      geometry::Vec2 p{box.lo.x + i * g.h, box.lo.y + j * g.h};
      if (d.contains(p)) {
        g.node_id[static_cast<std::size_t>(j - 1) * g.nx + (i - 1)] = id++;
        g.nodes.push_back(p);
      }
    }
  }
  if (id == 0) throw std::invalid_argument("no grid node falls inside the domain");

  auto at = [&](int i, int j) -> std::int32_t {
    if (i < 1 || i > g.nx || j < 1 || j > g.ny) return -1;
    return g.node_id[static_cast<std::size_t>(j - 1) * g.nx + (i - 1)];
  };
  double w = 1.0 / (g.h * g.h);
  std::vector<Eigen::Triplet<double>> ts;
  ts.reserve(static_cast<std::size_t>(5) * id);
  for (int j = 1; j <= g.ny; ++j) {
    for (int i = 1; i <= g.nx; ++i) {
      auto c = at(i, j);
      if (c < 0) continue;
      ts.emplace_back(c, c, 4 * w);
      for (auto [di, dj] : {std::pair{-1, 0}, {1, 0}, {0, -1}, {0, 1}}) {
        auto nb = at(i + di, j + dj);
        if (nb >= 0) ts.emplace_back(c, nb, -w);
      }
    }
  }
  g.laplacian.resize(id, id);
  g.laplacian.setFromTriplets(ts.begin(), ts.end());
  return g;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Ldlt = Eigen::SimplicialLDLT<SpMat>;

// Eigenproblem for M = D K D with positive diagonal D (empty D means M = K).
// All factorizations go through the congruent pencil
//   D^{-1} (M - sigma I) D^{-1} = K - sigma D^{-2},
// which stays well scaled when D spans many orders of magnitude, so the
// pivot-free LDLT neither lies about inertia nor blows up its element growth;
// shifted solves come back via (M - sigma I)^{-1} = D^{-1} (.)^{-1} D^{-1}.
struct ScaledOp {
  const SpMat& K;
  VectorXd D;  // empty for the unweighted case

  bool unit() const { return D.size() == 0; }
  Eigen::Index rows() const { return K.rows(); }

  VectorXd apply_m(const VectorXd& x) const {
    if (unit()) return K * x;
    return D.asDiagonal() * (K * (D.asDiagonal() * x)).eval();
  }

  SpMat shifted_pencil(double sigma) const {
    SpMat W(rows(), rows());
    W.setIdentity();
    if (!unit()) {
      VectorXd w = D.cwiseProduct(D).cwiseInverse();
      for (Eigen::Index i = 0; i < rows(); ++i) W.coeffRef(i, i) = w(i);
    }
    return K - sigma * W;
  }
};

struct GershBounds {
  double lo = 0, hi = 0;
};

GershBounds gershgorin(const ScaledOp& op) {
  VectorXd diag = VectorXd::Zero(op.rows());
  VectorXd off = VectorXd::Zero(op.rows());
  for (int k = 0; k < op.K.outerSize(); ++k) {
    for (SpMat::InnerIterator it(op.K, k); it; ++it) {
      double scale = op.unit() ? 1.0 : op.D(it.row()) * op.D(it.col());
      if (it.row() == it.col())
        diag(it.row()) = scale * it.value();
      else
        off(it.row()) += std::abs(scale * it.value());
    }
  }
  return {(diag - off).minCoeff(), (diag + off).maxCoeff()};
}

struct Shifted {
  std::unique_ptr<Ldlt> fac;
  double sigma = 0;   // shift actually used, nudged off near-singular pivots
  int negatives = 0;  // #{eigenvalues of M below sigma}

  VectorXd solve(const ScaledOp& op, const VectorXd& b) const {
    if (op.unit()) return fac->solve(b);
    VectorXd t = fac->solve((b.array() / op.D.array()).matrix());
    return (t.array() / op.D.array()).matrix();
  }
};

Shifted factor_at(const ScaledOp& op, double sigma, double scale) {
  double s = sigma;
  for (int attempt = 0;; ++attempt) {
    SpMat B = op.shifted_pencil(s);
    // A pivot only has an unreliable sign when it is tiny against the matrix
    // itself; comparing against the largest pivot would spuriously reject
    // factorizations whose element growth is large but whose inertia is fine.
    double bnorm = 0;
    for (int k = 0; k < B.outerSize(); ++k) {
      double row = 0;
      for (SpMat::InnerIterator it(B, k); it; ++it) row += std::abs(it.value());
      bnorm = std::max(bnorm, row);
    }
    double tiny = 1e-12 * std::max(bnorm, 1e-300);
    auto fac = std::make_unique<Ldlt>();
    fac->compute(B);
    if (fac->info() == Eigen::Success) {
      const auto& D = fac->vectorD();
      bool ok = true;
      int neg = 0;
      for (Eigen::Index i = 0; i < D.size(); ++i) {
        if (!std::isfinite(D(i)) || std::abs(D(i)) < tiny) {
          ok = false;
          break;
        }
        if (D(i) < 0) ++neg;
      }
      if (ok) return {std::move(fac), s, neg};
    }
    if (attempt >= 12) throw std::runtime_error("shifted factorization kept hitting tiny pivots");
    double step = scale * 1e-9 * (attempt / 2 + 1.0);
    s = sigma + ((attempt % 2) ? -step : step);
  }
}

struct SliceContext {
  const ScaledOp& op;
  const EigenOptions& opt;
  double scale = 1;   // spectrum magnitude, for shift nudges and tolerances
  double opnorm = 1;  // Gershgorin norm estimate, for residual gates
  std::uint64_t draw = 0;
  std::vector<double> out;
  double max_residual = 0;

  VectorXd random_unit(Eigen::Index n) {
    VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
      v(i) = 2 * rng::u01(opt.seed, rng::streams::lanczos, draw++) - 1;
    return v;
  }

  int harvest(const Shifted& F, double a, double b, int want, std::vector<VectorXd>& locked,
              std::vector<double>& lams);
  void solve_slice(double a, int ia, double b, int ib, int depth);
};

int SliceContext::harvest(const Shifted& F, double a, double b, int want,
                          std::vector<VectorXd>& locked, std::vector<double>& lams) {
  const Eigen::Index n = op.rows();
  const int mmax = static_cast<int>(std::min<Eigen::Index>(opt.max_lanczos, n));
  MatrixXd V(n, mmax + 1);
  VectorXd alpha = VectorXd::Zero(mmax), beta = VectorXd::Zero(mmax);

  auto orth_locked = [&](VectorXd& w) {
    for (const auto& q : locked) w -= q.dot(w) * q;
  };

  VectorXd v = random_unit(n);
  orth_locked(v);
  orth_locked(v);
  double nv = v.norm();
  if (nv < 1e-8) return 0;
  V.col(0) = v / nv;

  // count of T-converged Ritz values inside [a, b) at Krylov size mm
  auto window_count = [&](int mm) {
    MatrixXd T = MatrixXd::Zero(mm, mm);
    for (int i = 0; i < mm; ++i) {
      T(i, i) = alpha(i);
      if (i + 1 < mm) T(i, i + 1) = T(i + 1, i) = beta(i);
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(T);
    int got = 0;
    for (int i = 0; i < mm; ++i) {
      double theta = es.eigenvalues()(i);
      if (std::abs(theta) < 1e-300) continue;
      double lam = F.sigma + 1 / theta;
      if (!(lam >= a && lam < b)) continue;
      double resid = std::abs(beta(mm - 1) * es.eigenvectors()(mm - 1, i));
      if (resid / (theta * theta) <= std::max(1e-12 * std::abs(lam), 1e-14 * scale)) ++got;
    }
    return got;
  };

  int m = 0;
  for (int j = 0; j < mmax; ++j) {
    VectorXd w = F.solve(op, V.col(j));
    if (j > 0) w -= beta(j - 1) * V.col(j - 1);
    alpha(j) = V.col(j).dot(w);
    w -= alpha(j) * V.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      auto Vj = V.leftCols(j + 1);
      w.noalias() -= Vj * (Vj.transpose() * w);
      orth_locked(w);
    }
    beta(j) = w.norm();
    m = j + 1;
    if (beta(j) < 1e-14 * std::max(1.0, std::abs(alpha(j)))) break;  // invariant subspace
    V.col(j + 1) = w / beta(j);
    if (m >= 8 && m % 4 == 0 && m < mmax && window_count(m) >= want) break;
  }

  // final Ritz extraction with true-residual verification
  MatrixXd T = MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    T(i, i) = alpha(i);
    if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta(i);
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(T);
  int got = 0;
  for (int i = 0; i < m && got < want; ++i) {
    double theta = es.eigenvalues()(i);
    if (std::abs(theta) < 1e-300) continue;
    double lam = F.sigma + 1 / theta;
    if (!(lam >= a && lam < b)) continue;
    double resid = std::abs(beta(m - 1) * es.eigenvectors()(m - 1, i));
    if (resid / (theta * theta) > std::max(1e-12 * std::abs(lam), 1e-14 * scale)) continue;

    VectorXd x = V.leftCols(m) * es.eigenvectors().col(i);
    orth_locked(x);
    double xn = x.norm();
    if (xn < 0.5) continue;
    x /= xn;
    VectorXd Ax = op.apply_m(x);
    double rq = x.dot(Ax);
    double res = (Ax - rq * x).norm();
    if (res > 1e-8 * opnorm) continue;
    if (!(rq >= a && rq < b)) continue;
    locked.push_back(std::move(x));
    lams.push_back(rq);
    max_residual = std::max(max_residual, res);
    ++got;
  }
  return got;
}

void SliceContext::solve_slice(double a, int ia, double b, int ib, int depth) {
  int k = ib - ia;
  if (k <= 0) return;
  if (depth > 48) throw std::runtime_error("spectrum slicing recursion exhausted");
  double width = b - a;

  if (k > opt.max_per_slice && width > 1e-10 * scale) {
    auto M = factor_at(op, 0.5 * (a + b), scale);
    int im = std::clamp(M.negatives, ia, ib);
    solve_slice(a, ia, M.sigma, im, depth + 1);
    solve_slice(M.sigma, im, b, ib, depth + 1);
    return;
  }

  auto F = factor_at(op, 0.5 * (a + b), scale);
  std::vector<VectorXd> locked;
  std::vector<double> lams;
  int barren = 0;
  while (static_cast<int>(lams.size()) < k && barren < 3) {
    int got = harvest(F, a, b, k - static_cast<int>(lams.size()), locked, lams);
    barren = got > 0 ? 0 : barren + 1;
  }
  if (static_cast<int>(lams.size()) == k) {
    out.insert(out.end(), lams.begin(), lams.end());
    return;
  }
  if (width <= 1e-10 * scale)
    throw std::runtime_error("eigenvalue cluster too tight to slice");
  int im = std::clamp(F.negatives, ia, ib);
  solve_slice(a, ia, F.sigma, im, depth + 1);
  solve_slice(F.sigma, im, b, ib, depth + 1);
}

EigenResult eigen_below_scaled(const ScaledOp& op, double cutoff, const EigenOptions& opt,
                               double floor_hint = -std::numeric_limits<double>::infinity()) {
  EigenResult res;
  auto gb = gershgorin(op);
  double scale = std::max({std::abs(gb.lo), std::abs(gb.hi), std::abs(cutoff), 1e-30});

  auto Fcut = factor_at(op, cutoff, scale);
  res.cutoff_used = Fcut.sigma;
  res.inertia = Fcut.negatives;

  if (op.rows() <= opt.dense_threshold) {
    MatrixXd Md(op.K);
    if (!op.unit()) Md = op.D.asDiagonal() * Md * op.D.asDiagonal();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Md, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      double e = es.eigenvalues()(i);
      if (e < res.cutoff_used) res.values.push_back(e);
    }
    res.certified = static_cast<int>(res.values.size()) == res.inertia;
    return res;
  }

  if (res.inertia == 0) {
    res.certified = true;
    return res;
  }

  // A caller that knows a sharper lower bound than Gershgorin (often hundreds
  // of times tighter for congruence-scaled operators) passes it as floor_hint;
  // the inertia check below still certifies it.
  double lo = std::max(gb.lo, floor_hint);
  auto Ffloor = factor_at(op, lo - 1e-6 * scale, scale);
  if (Ffloor.negatives != 0)
    throw std::logic_error("nonzero inertia below the spectral floor");

  SliceContext ctx{op, opt, scale, std::max(std::abs(gb.lo), std::abs(gb.hi))};
  ctx.solve_slice(Ffloor.sigma, 0, Fcut.sigma, res.inertia, 0);
  std::sort(ctx.out.begin(), ctx.out.end());
  res.values = std::move(ctx.out);
  res.max_residual = ctx.max_residual;
  res.certified = static_cast<int>(res.values.size()) == res.inertia;
  return res;
}

}  // namespace

EigenResult eigen_below(const SpMat& A, double cutoff, const EigenOptions& opt) {
  if (A.rows() != A.cols() || A.rows() == 0)
    throw std::invalid_argument("matrix must be square and nonempty");
  return eigen_below_scaled(ScaledOp{A, {}}, cutoff, opt);
}

EigenResult fd_spectrum(const geometry::Domain& d, int n, double cutoff,
                        const EigenOptions& opt) {
  return eigen_below(discretize(d, n).laplacian, cutoff, opt);
}

double fd_lambda1(const geometry::Domain& d, int n, const EigenOptions& opt) {
  auto g = discretize(d, n);
  double rin =
      d.kind() == geometry::DomainKind::disk ? d.disk_radius() : d.summary().inradius;
  // lambda_1 never exceeds the inscribed disk's (j_{0,1} / r_in)^2
  double j01 = 2.40482555769577276862;
  double cutoff = 1.5 * j01 * j01 / (rin * rin);
  for (int tries = 0; tries < 8; ++tries) {
    auto res = eigen_below(g.laplacian, cutoff, opt);
    if (!res.certified) throw std::runtime_error("first-eigenvalue extraction not certified");
    if (!res.values.empty()) return res.values.front();
    cutoff *= 2;
  }
  throw std::runtime_error("no eigenvalue found below the expanding cutoff");
}

double localized_trace_negative(const SpMat& A, const std::vector<double>& phi,
                                double lambda, const EigenOptions& opt) {
  if (static_cast<Eigen::Index>(phi.size()) != A.rows())
    throw std::invalid_argument("phi must have one value per grid node");

  // Weights far below the maximum squash eigenvalues of D_phi K D_phi beneath
  // what double precision can sign (phi^2 against eps * |M|), so such nodes
  // are treated as outside the support. The trace is floor-independent: the
  // dropped tail carries less weight than round-off in the kept part.
  double pmax = 0;
  for (double v : phi) pmax = std::max(pmax, std::abs(v));
  double cut = 1e-6 * pmax;

  std::vector<Eigen::Index> sub(phi.size(), -1);
  Eigen::Index ns = 0;
  for (std::size_t i = 0; i < phi.size(); ++i)
    if (phi[i] != 0 && std::abs(phi[i]) >= cut) sub[i] = ns++;
  if (ns == 0) return 0;

  // Assemble the unscaled restriction K = (A - lambda)|_supp and keep the
  // weights as a congruence factor, so the eigensolver sees M = D_phi K D_phi
  // without ever factoring the badly row-scaled product directly.
  std::vector<Eigen::Triplet<double>> ts;
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SpMat::InnerIterator it(A, k); it; ++it) {
      auto si = sub[static_cast<std::size_t>(it.row())];
      auto sj = sub[static_cast<std::size_t>(it.col())];
      if (si < 0 || sj < 0) continue;
      ts.emplace_back(si, sj, it.value());
    }
  }
  for (std::size_t i = 0; i < phi.size(); ++i)
    if (sub[i] >= 0) ts.emplace_back(sub[i], sub[i], -lambda);

  SpMat K(ns, ns);
  K.setFromTriplets(ts.begin(), ts.end());
  VectorXd D(ns);
  for (std::size_t i = 0; i < phi.size(); ++i)
    if (sub[i] >= 0) D(sub[i]) = phi[i];

  // With A positive semidefinite, <x, D(A - lambda)Dx> >= -lambda |Dx|^2, so
  // every negative eigenvalue of the sandwich lies above -lambda max(phi)^2.
  // That bracket is far tighter than Gershgorin, whose row sums are dominated
  // by the stiffness scale of A rather than by the reachable spectrum.
  double hint = -std::numeric_limits<double>::infinity();
  if (lambda > 0) hint = -lambda * pmax * pmax * (1 + 1e-6);

  auto res = eigen_below_scaled(ScaledOp{K, std::move(D)}, 0.0, opt, hint);
  if (!res.certified) throw std::runtime_error("localized trace extraction not certified");
  long double sum = 0;
  for (double e : res.values)
    if (e < 0) sum += -e;
  return static_cast<double>(sum);
}

BerezinReport check_berezin(const std::vector<double>& ev, double area,
                            const std::vector<double>& lambdas, double slack) {
  BerezinReport rep;
  rep.all_ok = true;
  for (double lam : lambdas) {
    BerezinRow row;
    row.lambda = lam;
    row.riesz1 = riesz_mean(ev, 1, lam);
    row.bound = area * lam * lam / (8 * kPi);
    row.ok = row.riesz1 <= row.bound * (1 + slack) + 1e-30;
    rep.all_ok = rep.all_ok && row.ok;
    rep.rows.push_back(row);
  }
  return rep;
}

HerschProtterReport check_hersch_protter(const geometry::Domain& d, int n,
                                         const EigenOptions& opt) {
  HerschProtterReport rep;
  double rin =
      d.kind() == geometry::DomainKind::disk ? d.disk_radius() : d.summary().inradius;
  rep.lambda1 = fd_lambda1(d, n, opt);
  rep.bound = kPi * kPi / (4 * rin * rin);
  rep.ratio = rep.lambda1 / rep.bound;
  rep.ok = rep.ratio >= 1 - 0.02;
  return rep;
}

}  // namespace weyl_lab::spectral
