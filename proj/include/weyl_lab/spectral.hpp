#pragma once

#include <Eigen/Sparse>
#include <cstdint>
#include <vector>

#include "weyl_lab/geometry.hpp"

// Dirichlet spectra: closed forms for rectangles and disks, a masked five-point
// discretization for everything else, and a certified sparse eigensolver that
// cross-checks every extraction against LDLT inertia counts.
namespace weyl_lab::spectral {

using SpMat = Eigen::SparseMatrix<double>;

// pi^2 (m^2/a^2 + k^2/b^2) <= cutoff, ascending with multiplicity
std::vector<double> exact_rectangle_spectrum(double a, double b, double cutoff);
// (j_{n,k}/R)^2 <= cutoff; angular orders n >= 1 enter twice
std::vector<double> exact_disk_spectrum(double radius, double cutoff);

struct TieFlag {
  bool tie = false;
  double gap = 0;  // relative distance from lambda to the nearest eigenvalue
};

// #{e <= lambda}; a tie is flagged when lambda lies within 1e-12 relative of
// some eigenvalue, where the count is convention-dependent
double counting(const std::vector<double>& ev, double lambda, TieFlag* flag = nullptr);

// sum of (lambda - e)^gamma over e < lambda; gamma = 0 reduces to the strict count
double riesz_mean(const std::vector<double>& ev, double gamma, double lambda);

struct Discretization {
  double h = 0;
  int nx = 0, ny = 0;                 // candidate lattice extents
  geometry::Vec2 origin;              // lattice node (i,j) sits at origin + (i h, j h), 1-based
  std::vector<std::int32_t> node_id;  // nx * ny, row-major, -1 for masked-out nodes
  std::vector<geometry::Vec2> nodes;  // coordinates of kept nodes
  SpMat laplacian;
};

// five-point Dirichlet Laplacian with h = (longest bbox side)/(n+1), keeping
// lattice nodes strictly inside the domain
Discretization discretize(const geometry::Domain& d, int n);

struct EigenOptions {
  int dense_threshold = 1500;  // below this, use a direct dense solve
  int max_per_slice = 48;
  int max_lanczos = 200;
  std::uint64_t seed = 1;
};

struct EigenResult {
  std::vector<double> values;  // ascending, strictly below cutoff_used
  double cutoff_used = 0;      // requested cutoff, nudged off any eigenvalue
  int inertia = 0;             // #{eigenvalues < cutoff_used} by Sylvester's law
  bool certified = false;      // values.size() == inertia
  double max_residual = 0;     // worst |A x - lambda x| over accepted pairs
};

// every eigenvalue of the symmetric matrix A below cutoff, by spectrum slicing
// with shift-invert Lanczos (or a dense solve when A is small), certified
// against LDLT inertia counts
EigenResult eigen_below(const SpMat& A, double cutoff, const EigenOptions& opt = {});

// convenience: discretize then solve
EigenResult fd_spectrum(const geometry::Domain& d, int n, double cutoff,
                        const EigenOptions& opt = {});

// smallest discrete eigenvalue; the search cutoff starts at the inscribed-disk
// upper bound and doubles until something is found
double fd_lambda1(const geometry::Domain& d, int n, const EigenOptions& opt = {});

// trace of the negative part of D_phi (A - lambda I) D_phi restricted to the
// support of phi (phi sampled per grid node); weights below 1e-6 of max|phi|
// count as zero, since their squared scale is unresolvable in double.
// A must be positive semidefinite (a Dirichlet stiffness matrix is), which
// confines the sandwiched negatives to [-lambda max(phi)^2, 0)
double localized_trace_negative(const SpMat& A, const std::vector<double>& phi,
                                double lambda, const EigenOptions& opt = {});

struct BerezinRow {
  double lambda = 0;
  double riesz1 = 0;
  double bound = 0;  // |Omega| lambda^2 / (8 pi)
  bool ok = false;
};

struct BerezinReport {
  std::vector<BerezinRow> rows;
  bool all_ok = false;
};

// first-order Riesz means against the phase-space bound, with a slack factor
// for discretized spectra
BerezinReport check_berezin(const std::vector<double>& ev, double area,
                            const std::vector<double>& lambdas, double slack = 0);

struct HerschProtterReport {
  double lambda1 = 0;
  double bound = 0;  // pi^2 / (4 r_in^2)
  double ratio = 0;  // lambda1 / bound
  bool ok = false;
};

// convex-domain first-eigenvalue inequality lambda_1 >= pi^2 / (4 r_in^2),
// checked on the discretized spectrum with a small discretization allowance
HerschProtterReport check_hersch_protter(const geometry::Domain& d, int n,
                                         const EigenOptions& opt = {});

}  // namespace weyl_lab::spectral
