#ifndef SOLITON_NUMERIC_HPP
#define SOLITON_NUMERIC_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

namespace soliton {

class Spectrum;
class SolutionRep;

// Symmetric grid containing 0: n_points odd >= 3.
struct GridSpec {
  double half_width = 25.0;
  int n_points = 2001;

  GridSpec() = default;
  GridSpec(double hw, int n);

  // half_width = 25/eta_min: every tau exponential is below ~1e-10 outside.
  static GridSpec for_spectrum(const Spectrum& spectrum, int n = 2001);

  double spacing() const { return 2.0 * half_width / (n_points - 1); }
  double point(int m) const { return -half_width + spacing() * m; }
};

// Adaptive Gauss-Kronrod (G7,K15) bisection with absolute-error target.
// The per-interval estimate |K15-G7| is kept unscaled, which overestimates
// the actual K15 error; the reported tolerance is conservative.
double integrate(const std::function<double(double)>& fn, double a, double b, double tol);

// Brent root refinement on a sign-changing bracket.
double find_root(const std::function<double(double)>& fn, double lo, double hi, double tol);

// Symmetric banded matrix, lower storage: band(r, j) = A(j+r, j), 0 <= r <= kd.
class BandedSymMatrix {
 public:
  BandedSymMatrix(int n, int kd);
  int size() const { return n_; }
  int bandwidth() const { return kd_; }
  double& at(int i, int j);        // |i-j| <= kd
  double get(int i, int j) const;  // 0 outside the band
  void multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  double inf_norm() const;
  Eigen::MatrixXd dense() const;

 private:
  int n_, kd_;
  Eigen::MatrixXd band_;  // (kd+1) x n
};

struct EigPair {
  double value = 0.0;
  Eigen::VectorXd vector;
};

// k eigenpairs of A nearest `shift`, via banded LU factorization of A - shift I
// and block shift-invert subspace iteration; pairs sorted by |value - shift|.
// Residuals satisfy ||A v - v value|| <= tol * ||A||_inf on return.
std::vector<EigPair> eigs_smallest(const BandedSymMatrix& A, int k, double shift,
                                   double tol = 1e-10, std::uint64_t seed = 0x5eed);

// Dense cross-check route (small problems / tests).
std::vector<EigPair> eigs_dense(const BandedSymMatrix& A, int k, double shift);

// Dormand-Prince 5(4) with PI step control.  Integrates from x0 to x1 and
// records the state at the requested sample points (which must run
// monotonically from x0 toward x1).  Throws StepUnderflow when the step
// collapses, the signature of leaving the stable manifold.
using OdeRhs = std::function<void(double, const double*, double*)>;

struct Trajectory {
  std::vector<double> x;
  std::vector<std::vector<double>> y;  // y[k] = state at x[k]
};

Trajectory rk_integrate(const OdeRhs& rhs, const std::vector<double>& y0, double x0, double x1,
                        double rtol, double atol, const std::vector<double>& sample);

// Independent oracle for the tau construction: initial data (u_i, u_i') is
// read off the rep at x0; the dynamics integrated is the bare system
// u_i'' = -mu_i u_i - 2 (sum_k u_k^2) u_i and nothing else.  step_tol is the relative tolerance of the integrator.
Trajectory shoot(const SolutionRep& rep, double x0, double x1, double step_tol,
                 int n_samples = 501);

}  // namespace soliton

#endif
