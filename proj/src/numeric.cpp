#include "soliton/numeric.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "soliton/errors.hpp"
#include "soliton/hirota.hpp"

namespace soliton {

GridSpec::GridSpec(double hw, int n) : half_width(hw), n_points(n) {
  if (!(hw > 0.0)) throw std::invalid_argument("GridSpec: half_width must be positive");
  if (n < 3 || n % 2 == 0) throw std::invalid_argument("GridSpec: n_points must be odd and >= 3");
}

GridSpec GridSpec::for_spectrum(const Spectrum& spectrum, int n) {
  return GridSpec(25.0 / spectrum.eta_min(), n);
}

namespace {

// Gauss-Kronrod 7-15 nodes/weights on [-1,1] (positive half, symmetric).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GKResult {
  double kronrod;
  double err;
};

GKResult gk15(const std::function<double(double)>& fn, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fv[15];
  for (int j = 0; j < 7; ++j) {
    fv[j] = fn(c - h * kXgk[j]);
    fv[14 - j] = fn(c + h * kXgk[j]);
  }
  fv[7] = fn(c);
  double resk = kWgk[7] * fv[7];
  double resg = kWg[3] * fv[7];
  for (int j = 0; j < 7; ++j) resk += kWgk[j] * (fv[j] + fv[14 - j]);
  for (int j = 0; j < 3; ++j) resg += kWg[j] * (fv[2 * j + 1] + fv[13 - 2 * j]);
  return {resk * h, std::abs(resk - resg) * std::abs(h)};
}

}  // namespace

double integrate(const std::function<double(double)>& fn, double a, double b, double tol) {
  if (a == b) return 0.0;
  struct Interval {
    double a, b, value, err;
  };
  GKResult whole = gk15(fn, a, b);
  std::vector<Interval> heap{{a, b, whole.kronrod, whole.err}};
  double total_err = whole.err;
  double total_val = whole.kronrod;
  const double span = std::abs(b - a);
  int splits = 0;
  while (total_err > tol) {
    if (++splits > 4000) throw ToleranceNotMet("integrate: refinement limit reached");
    // split the interval with the largest error estimate
    std::size_t worst = 0;
    for (std::size_t i = 1; i < heap.size(); ++i)
      if (heap[i].err > heap[worst].err) worst = i;
    Interval iv = heap[worst];
    if (std::abs(iv.b - iv.a) < 1e-15 * span)
      throw ToleranceNotMet("integrate: interval underflow before reaching tolerance");
    const double mid = 0.5 * (iv.a + iv.b);
    GKResult left = gk15(fn, iv.a, mid);
    GKResult right = gk15(fn, mid, iv.b);
    total_val += left.kronrod + right.kronrod - iv.value;
    total_err += left.err + right.err - iv.err;
    heap[worst] = {iv.a, mid, left.kronrod, left.err};
    heap.push_back({mid, iv.b, right.kronrod, right.err});
  }
  return total_val;
}

double find_root(const std::function<double(double)>& fn, double lo, double hi, double tol) {
  double a = lo, b = hi;
  double fa = fn(a), fb = fn(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) throw NoBracket("find_root: endpoints do not bracket a root");
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < 200; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = fn(b);
  }
  return b;
}

BandedSymMatrix::BandedSymMatrix(int n, int kd) : n_(n), kd_(kd) {
  if (n < 1 || kd < 0 || kd >= n) throw std::invalid_argument("BandedSymMatrix: bad shape");
  band_ = Eigen::MatrixXd::Zero(kd + 1, n);
}

double& BandedSymMatrix::at(int i, int j) {
  if (i < j) std::swap(i, j);
  if (i - j > kd_ || i >= n_ || j < 0) throw IndexOutOfRange("BandedSymMatrix::at outside band");
  return band_(i - j, j);
}

double BandedSymMatrix::get(int i, int j) const {
  if (i < j) std::swap(i, j);
  if (j < 0 || i >= n_ || i - j > kd_) return 0.0;
  return band_(i - j, j);
}

void BandedSymMatrix::multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  y.setZero(n_);
  for (int j = 0; j < n_; ++j) {
    y[j] += band_(0, j) * x[j];
    const int top = std::min(kd_, n_ - 1 - j);
    for (int r = 1; r <= top; ++r) {
      y[j + r] += band_(r, j) * x[j];
      y[j] += band_(r, j) * x[j + r];
    }
  }
}

double BandedSymMatrix::inf_norm() const {
  Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(n_);
  for (int j = 0; j < n_; ++j) {
    rowsum[j] += std::abs(band_(0, j));
    const int top = std::min(kd_, n_ - 1 - j);
    for (int r = 1; r <= top; ++r) {
      rowsum[j + r] += std::abs(band_(r, j));
      rowsum[j] += std::abs(band_(r, j));
    }
  }
  return rowsum.maxCoeff();
}

Eigen::MatrixXd BandedSymMatrix::dense() const {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n_, n_);
  for (int j = 0; j < n_; ++j) {
    const int top = std::min(kd_, n_ - 1 - j);
    for (int r = 0; r <= top; ++r) {
      D(j + r, j) = band_(r, j);
      D(j, j + r) = band_(r, j);
    }
  }
  return D;
}

namespace {

// LU of A - shift I in LAPACK general-band storage; solves via dgbtrs.
class BandedShiftSolver {
 public:
  BandedShiftSolver(const BandedSymMatrix& A, double shift)
      : n_(A.size()), kl_(A.bandwidth()), ldab_(3 * A.bandwidth() + 1) {
    ab_.assign(static_cast<std::size_t>(ldab_) * n_, 0.0);
    for (int j = 0; j < n_; ++j)
      for (int i = std::max(0, j - kl_); i <= std::min(n_ - 1, j + kl_); ++i)
        ab_[static_cast<std::size_t>(j) * ldab_ + (2 * kl_ + i - j)] =
            A.get(i, j) - (i == j ? shift : 0.0);
    ipiv_.assign(n_, 0);
    const lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n_, n_, kl_, kl_, ab_.data(), ldab_,
                                           ipiv_.data());
    singular_ = info != 0;
  }

  bool singular() const { return singular_; }

  void solve_in_place(Eigen::MatrixXd& B) const {
    const lapack_int info =
        LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n_, kl_, kl_, static_cast<lapack_int>(B.cols()),
                       ab_.data(), ldab_, ipiv_.data(), B.data(), n_);
    if (info != 0) throw EigenFailure("banded solve failed");
  }

 private:
  int n_, kl_, ldab_;
  std::vector<double> ab_;
  std::vector<lapack_int> ipiv_;
  bool singular_ = false;
};

}  // namespace

namespace {

double pair_residual(const BandedSymMatrix& A, const EigPair& p, Eigen::VectorXd& work) {
  A.multiply(p.vector, work);
  return (work - p.value * p.vector).norm();
}

// Block inverse iteration at the cluster shift: refines a group of nearly
// degenerate Ritz pairs to tight residuals while preserving their span.
void polish_cluster(const BandedSymMatrix& A, std::vector<EigPair>& pairs, int lo, int hi,
                    double tol, double norm) {
  const int n = A.size();
  const int m = hi - lo;
  double sigma = 0.0;
  for (int j = lo; j < hi; ++j) sigma += pairs[static_cast<std::size_t>(j)].value / m;

  Eigen::MatrixXd V(n, m);
  for (int j = 0; j < m; ++j) V.col(j) = pairs[static_cast<std::size_t>(lo + j)].vector;
  Eigen::VectorXd Av(n);

  for (int round = 0; round < 12; ++round) {
    bool done = true;
    for (int j = lo; j < hi; ++j)
      done = done && pair_residual(A, pairs[static_cast<std::size_t>(j)], Av) <= tol * norm;
    if (done) return;

    std::unique_ptr<BandedShiftSolver> solver;
    double s = sigma;
    for (int attempt = 0; attempt < 4; ++attempt) {
      solver = std::make_unique<BandedShiftSolver>(A, s);
      if (!solver->singular()) break;
      s += (attempt + 1) * 1e-11 * std::max(norm, 1.0);
    }
    if (solver->singular()) return;
    solver->solve_in_place(V);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(V);
    V = qr.householderQ() * Eigen::MatrixXd::Identity(n, m);
    Eigen::MatrixXd AV(n, m);
    for (int j = 0; j < m; ++j) {
      A.multiply(V.col(j), Av);
      AV.col(j) = Av;
    }
    Eigen::MatrixXd H = V.transpose() * AV;
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success) return;
    V = (V * es.eigenvectors()).eval();
    double mean = 0.0;
    for (int j = 0; j < m; ++j) {
      pairs[static_cast<std::size_t>(lo + j)].value = es.eigenvalues()[j];
      pairs[static_cast<std::size_t>(lo + j)].vector = V.col(j);
      mean += es.eigenvalues()[j] / m;
    }
    sigma = mean;
  }
}

}  // namespace

std::vector<EigPair> eigs_smallest(const BandedSymMatrix& A, int k, double shift, double tol,
                                   std::uint64_t seed) {
  const int n = A.size();
  if (k < 1 || k > n) throw std::invalid_argument("eigs_smallest: bad k");
  const double norm = std::max(A.inf_norm(), 1e-300);

  double sigma = shift;
  std::unique_ptr<BandedShiftSolver> solver;
  for (int attempt = 0; attempt < 4; ++attempt) {
    solver = std::make_unique<BandedShiftSolver>(A, sigma);
    if (!solver->singular()) break;
    sigma += (attempt + 1) * 1e-10 * norm;  // shift sits on an eigenvalue, nudge
  }
  if (solver->singular()) throw EigenFailure("eigs_smallest: factorization singular at shift");

  const int p = std::min(n, k + 8);
  const int kb = std::min(p, k + 2);  // polish a small buffer past the wanted pairs
  std::mt19937_64 rng(seed);
  auto unit = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5; };
  Eigen::MatrixXd V(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) V(i, j) = unit();

  Eigen::VectorXd Av(n);
  Eigen::MatrixXd AV(n, p);
  std::vector<EigPair> out;
  Eigen::VectorXd prev_vals;

  for (int it = 0; it < 60; ++it) {
    solver->solve_in_place(V);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(V);
    V = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);

    for (int j = 0; j < p; ++j) {
      A.multiply(V.col(j), Av);
      AV.col(j) = Av;
    }
    Eigen::MatrixXd H = V.transpose() * AV;
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success) throw EigenFailure("eigs_smallest: dense Ritz solve failed");

    // sort Ritz pairs by distance to the shift
    std::vector<int> order(p);
    for (int j = 0; j < p; ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(es.eigenvalues()[a] - sigma) < std::abs(es.eigenvalues()[b] - sigma);
    });

    Eigen::MatrixXd W = V * es.eigenvectors();
    out.clear();
    bool converged = true;
    Eigen::VectorXd vals(kb);
    for (int j = 0; j < kb; ++j) {
      const int c = order[j];
      EigPair pair{es.eigenvalues()[c], W.col(c)};
      if (j < k && pair_residual(A, pair, Av) > tol * norm) converged = false;
      vals[j] = pair.value;
      out.push_back(std::move(pair));
    }
    if (converged) {
      out.resize(static_cast<std::size_t>(k));
      return out;
    }
    // once the wanted Ritz values stagnate, block iteration has done its part;
    // switch to cluster-wise inverse iteration for the residual polish
    const bool stagnant =
        prev_vals.size() == kb && (vals - prev_vals).cwiseAbs().maxCoeff() < 1e-12 * norm;
    prev_vals = vals;
    if (stagnant || it == 59) break;
    V = W.leftCols(p);
  }

  // group nearly degenerate values so their eigenspaces are refined together
  int lo = 0;
  while (lo < kb) {
    int hi = lo + 1;
    while (hi < kb &&
           std::abs(out[static_cast<std::size_t>(hi)].value -
                    out[static_cast<std::size_t>(hi - 1)].value) <
               1e-2 * (std::abs(out[static_cast<std::size_t>(hi)].value) + 1e-3 * norm))
      ++hi;
    polish_cluster(A, out, lo, hi, tol, norm);
    lo = hi;
  }
  std::sort(out.begin(), out.end(), [&](const EigPair& a, const EigPair& b) {
    return std::abs(a.value - sigma) < std::abs(b.value - sigma);
  });
  out.resize(static_cast<std::size_t>(k));
  for (EigPair& pr : out)
    if (pair_residual(A, pr, Av) > tol * norm)
      throw NoConvergence("eigs_smallest: residual polish did not converge");
  return out;
}

std::vector<EigPair> eigs_dense(const BandedSymMatrix& A, int k, double shift) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.dense());
  if (es.info() != Eigen::Success) throw EigenFailure("eigs_dense: solver failed");
  const int n = A.size();
  std::vector<int> order(n);
  for (int j = 0; j < n; ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(es.eigenvalues()[a] - shift) < std::abs(es.eigenvalues()[b] - shift);
  });
  std::vector<EigPair> out;
  for (int j = 0; j < k; ++j)
    out.push_back({es.eigenvalues()[order[j]], es.eigenvectors().col(order[j])});
  return out;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kA[6][6] = {
    {1.0 / 5, 0, 0, 0, 0, 0},
    {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
    {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
    {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr double kB5[7] = {35.0 / 384,      0, 500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84, 0};
constexpr double kB4[7] = {5179.0 / 57600,    0,           7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
constexpr double kC[6] = {1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};

}  // namespace

Trajectory rk_integrate(const OdeRhs& rhs, const std::vector<double>& y0, double x0, double x1,
                        double rtol, double atol, const std::vector<double>& sample) {
  const std::size_t dim = y0.size();
  const double dir = (x1 >= x0) ? 1.0 : -1.0;
  const double span = std::abs(x1 - x0);
  if (span == 0.0) throw std::invalid_argument("rk_integrate: empty interval");

  Trajectory traj;
  std::vector<double> y = y0;
  double x = x0;
  std::size_t next_sample = 0;
  auto record_until = [&](double xcur) {
    while (next_sample < sample.size() && dir * (sample[next_sample] - xcur) <= 1e-12 * span) {
      traj.x.push_back(sample[next_sample]);
      traj.y.push_back(y);
      ++next_sample;
    }
  };

  std::vector<double> k[7], ytmp(dim), ynew(dim);
  for (auto& kv : k) kv.assign(dim, 0.0);
  rhs(x, y.data(), k[0].data());

  double h = dir * std::min(1e-2 * span, 0.1);  // controller step, never event-clipped
  double err_prev = 1e-4;
  record_until(x);

  long steps = 0;
  while (dir * (x1 - x) > 1e-12 * span) {
    if (++steps > 1000000) throw NoConvergence("rk_integrate: step limit exceeded");
    if (std::abs(h) < 1e-14 * span)
      throw StepUnderflow("rk_integrate: step size underflow (trajectory leaving bounded set)");

    // clip the attempted step to the domain end / next sample point
    double h_use = h;
    int land = -1;
    if (dir * (x + h_use - x1) > 0.0) h_use = x1 - x;
    if (next_sample < sample.size() && dir * (x + h_use - sample[next_sample]) >= 0.0) {
      h_use = sample[next_sample] - x;
      land = static_cast<int>(next_sample);
    }

    for (int s = 1; s < 7; ++s) {
      for (std::size_t i = 0; i < dim; ++i) {
        double acc = 0.0;
        for (int j = 0; j < s; ++j) acc += kA[s - 1][j] * k[j][i];
        ytmp[i] = y[i] + h_use * acc;
      }
      rhs(x + kC[s - 1] * h_use, ytmp.data(), k[s].data());
    }
    double errnorm = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      double acc5 = 0.0, acc4 = 0.0;
      for (int j = 0; j < 7; ++j) {
        acc5 += kB5[j] * k[j][i];
        acc4 += kB4[j] * k[j][i];
      }
      ynew[i] = y[i] + h_use * acc5;
      const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double e = h_use * (acc5 - acc4) / sc;
      errnorm += e * e;
    }
    errnorm = std::sqrt(errnorm / static_cast<double>(dim));

    const bool accept = errnorm <= 1.0 || std::abs(h_use) <= 1.01e-14 * span;
    if (accept) {
      x = (land >= 0) ? sample[static_cast<std::size_t>(land)] : x + h_use;
      y = ynew;
      k[0] = k[6];  // FSAL
      rhs(x, y.data(), k[0].data());
      record_until(x);
    }
    const double fac = 0.9 * std::pow(std::max(errnorm, 1e-12), -0.14) * std::pow(err_prev, 0.08);
    const double h_new = h_use * std::clamp(fac, 0.2, 5.0);
    // an event-clipped accepted step must not shrink the controller step
    h = (accept && land >= 0) ? dir * std::max(std::abs(h), std::abs(h_new)) : h_new;
    if (accept) err_prev = std::max(errnorm, 1e-12);
  }
  record_until(x + dir * 2e-12 * span);
  return traj;
}

Trajectory shoot(const SolutionRep& rep, double x0, double x1, double step_tol, int n_samples) {
  const int n = rep.size();
  std::vector<double> y0(2 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const ExpRatio::Jet j = rep.component_jet(i, x0);
    y0[static_cast<std::size_t>(i)] = j.v;
    y0[static_cast<std::size_t>(n + i)] = j.d1;
  }
  std::vector<double> mus = rep.spectrum().mus();
  OdeRhs rhs = [n, mus](double, const double* y, double* dy) {
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += y[i] * y[i];
    for (int i = 0; i < n; ++i) {
      dy[i] = y[n + i];
      dy[n + i] = -mus[static_cast<std::size_t>(i)] * y[i] - 2.0 * v * y[i];
    }
  };
  std::vector<double> sample(static_cast<std::size_t>(n_samples));
  for (int m = 0; m < n_samples; ++m)
    sample[static_cast<std::size_t>(m)] = x0 + (x1 - x0) * m / (n_samples - 1);
  return rk_integrate(rhs, y0, x0, x1, step_tol, step_tol * 1e-2, sample);
}

}  // namespace soliton
