#include "soliton/linearize.hpp"

#include <algorithm>
#include <cmath>

#include "soliton/errors.hpp"

namespace soliton {

std::vector<TangentVector> tangent_vectors(const SolutionRep& rep) {
  const int n = rep.size();
  std::vector<TangentVector> out;
  out.reserve(static_cast<std::size_t>(n));
  const ExpPoly fsq = rep.f() * rep.f();
  for (int t = 0; t < n; ++t) {
    const ParamDerivative pd = partial_wrt_param(rep, t);  // throws ZeroParameter
    std::vector<ExpRatio> comps;
    comps.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      comps.emplace_back(pd.dg[static_cast<std::size_t>(i)] * rep.f() - rep.g(i) * pd.df, fsq);
    out.emplace_back(std::move(comps));
  }
  return out;
}

TangentVector translation_vector(const SolutionRep& rep) {
  const ExpPoly fsq = rep.f() * rep.f();
  const ExpPoly df = rep.f().derivative();
  std::vector<ExpRatio> comps;
  comps.reserve(static_cast<std::size_t>(rep.size()));
  for (int i = 0; i < rep.size(); ++i)
    comps.emplace_back(rep.g(i).derivative() * rep.f() - rep.g(i) * df, fsq);
  return TangentVector(std::move(comps));
}

TangentVector rotation_kernel(const SolutionRep& rep, int i, int j) {
  const int n = rep.size();
  if (i < 0 || i >= n || j < 0 || j >= n || i == j)
    throw IndexOutOfRange("rotation_kernel: component pair");
  if (rep.spectrum().mu(i) != rep.spectrum().mu(j))
    throw UnequalMu("rotation_kernel: needs mu_i = mu_j");
  std::vector<ExpRatio> comps;
  comps.reserve(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) {
    if (c == i)
      comps.emplace_back(rep.g(j).scaled(-1.0), rep.f());
    else if (c == j)
      comps.emplace_back(rep.g(i), rep.f());
    else
      comps.emplace_back(ExpPoly(), rep.f());
  }
  return TangentVector(std::move(comps));
}

std::vector<double> linearized_residual(const SolutionRep& rep, const TangentVector& phi,
                                        double x) {
  const int n = rep.size();
  if (phi.size() != n) throw SizeMismatch("linearized_residual: component count mismatch");
  const auto uj = solution_jets(rep, x);
  double usq = 0.0, uphi = 0.0;
  std::vector<ExpRatio::Jet> pj(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    pj[static_cast<std::size_t>(i)] = phi.comp(i).jet(x);
    usq += uj[static_cast<std::size_t>(i)].v * uj[static_cast<std::size_t>(i)].v;
    uphi += uj[static_cast<std::size_t>(i)].v * pj[static_cast<std::size_t>(i)].v;
  }
  std::vector<double> r(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& u = uj[static_cast<std::size_t>(i)];
    const auto& f = pj[static_cast<std::size_t>(i)];
    r[static_cast<std::size_t>(i)] =
        f.d2 + 2.0 * usq * f.v + 4.0 * uphi * u.v + rep.spectrum().mu(i) * f.v;
  }
  return r;
}

double linearized_residual_sup(const SolutionRep& rep, const TangentVector& phi,
                               const GridSpec& grid) {
  double sup = 0.0;
  for (int m = 0; m < grid.n_points; ++m)
    for (double ri : linearized_residual(rep, phi, grid.point(m))) sup = std::max(sup, std::abs(ri));
  return sup;
}

MotionValue linearized_motion_constant_data(const std::vector<double>& mus,
                                            const std::vector<double>& u,
                                            const std::vector<double>& du,
                                            const std::vector<double>& phi,
                                            const std::vector<double>& dphi, int k) {
  const int n = static_cast<int>(mus.size());
  if (k < 1 || k > n) throw OrderOutOfRange("linearized_motion_constant: k must lie in 1..N");
  if (u.size() != mus.size() || du.size() != mus.size() || phi.size() != mus.size() ||
      dphi.size() != mus.size())
    throw SizeMismatch("linearized_motion_constant: state length mismatch");
  const std::vector<double> e = elem_sym(mus);
  double usq = 0.0, uphi = 0.0;
  for (int i = 0; i < n; ++i) {
    usq += u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)];
    uphi += u[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(i)];
  }

  MotionValue mv;
  auto accumulate = [&mv](double term) {
    mv.value += term;
    mv.scale = std::max(mv.scale, std::abs(term));
  };

  if (k >= 2) {
    for (int l = 0; l < n; ++l) {
      const std::vector<double> el = elem_sym_exclude(e, mus[static_cast<std::size_t>(l)]);
      for (int m = l + 1; m < n; ++m) {
        const std::vector<double> elm = elem_sym_exclude(el, mus[static_cast<std::size_t>(m)]);
        const std::size_t ls = static_cast<std::size_t>(l), ms = static_cast<std::size_t>(m);
        const double w = du[ls] * u[ms] - u[ls] * du[ms];
        const double wdot = dphi[ls] * u[ms] + du[ls] * phi[ms] - phi[ls] * du[ms] - u[ls] * dphi[ms];
        accumulate(elm[static_cast<std::size_t>(k - 2)] * w * wdot);
      }
    }
  }
  for (int j = 0; j < n; ++j) {
    const std::vector<double> ej = elem_sym_exclude(e, mus[static_cast<std::size_t>(j)]);
    const double c = ej[static_cast<std::size_t>(k - 1)];
    const std::size_t js = static_cast<std::size_t>(j);
    accumulate(usq * c * u[js] * phi[js]);
    accumulate(uphi * c * u[js] * u[js]);
    accumulate(c * du[js] * dphi[js]);
    accumulate(c * mus[js] * u[js] * phi[js]);
  }
  return mv;
}

MotionValue linearized_motion_constant(const SolutionRep& rep, const TangentVector& phi, int k,
                                       double x) {
  const int n = rep.size();
  if (phi.size() != n) throw SizeMismatch("linearized_motion_constant: component count mismatch");
  const auto uj = solution_jets(rep, x);
  std::vector<double> u(uj.size()), du(uj.size()), pv(uj.size()), pd(uj.size());
  for (int i = 0; i < n; ++i) {
    const ExpRatio::Jet j = phi.comp(i).jet(x);
    u[static_cast<std::size_t>(i)] = uj[static_cast<std::size_t>(i)].v;
    du[static_cast<std::size_t>(i)] = uj[static_cast<std::size_t>(i)].d1;
    pv[static_cast<std::size_t>(i)] = j.v;
    pd[static_cast<std::size_t>(i)] = j.d1;
  }
  return linearized_motion_constant_data(rep.spectrum().mus(), u, du, pv, pd, k);
}

MotionReport linearized_motion_report(const SolutionRep& rep, const TangentVector& phi, int k,
                                      const GridSpec& grid) {
  MotionReport out;
  out.order = k;
  out.grid = grid;
  for (int m = 0; m < grid.n_points; ++m) {
    const MotionValue mv = linearized_motion_constant(rep, phi, k, grid.point(m));
    out.sup_abs = std::max(out.sup_abs, std::abs(mv.value));
    out.sup_scale = std::max(out.sup_scale, mv.scale);
  }
  return out;
}

namespace {

// A = -d^2/dx^2 (4th order, Dirichlet) - 2V - 4 u u^T - diag(mu), interleaved
// by grid node; half bandwidth 2N.
BandedSymMatrix assemble_linearized(const SolutionRep& rep, const GridSpec& grid) {
  const int n = rep.size();
  const int m = grid.n_points;
  const double h = grid.spacing();
  const double inv12h2 = 1.0 / (12.0 * h * h);
  BandedSymMatrix A(n * m, 2 * n);

  std::vector<double> u(static_cast<std::size_t>(n));
  for (int g = 0; g < m; ++g) {
    const double x = grid.point(g);
    double v = 0.0;
    for (int i = 0; i < n; ++i) {
      u[static_cast<std::size_t>(i)] = rep.eval_component(i, x);
      v += u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < n; ++i) {
      const int row = g * n + i;
      A.at(row, row) += 30.0 * inv12h2 - 2.0 * v - rep.spectrum().mu(i) -
                        4.0 * u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)];
      for (int j = 0; j < i; ++j)
        A.at(row, g * n + j) += -4.0 * u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(j)];
      if (g >= 1) A.at(row, row - n) += -16.0 * inv12h2;
      if (g >= 2) A.at(row, row - 2 * n) += inv12h2;
    }
  }
  return A;
}

BandedSymMatrix assemble_scalar(const SolutionRep& rep, const GridSpec& grid) {
  const int m = grid.n_points;
  const double h = grid.spacing();
  const double inv12h2 = 1.0 / (12.0 * h * h);
  BandedSymMatrix A(m, 2);
  for (int g = 0; g < m; ++g) {
    const double x = grid.point(g);
    double v = 0.0;
    for (int i = 0; i < rep.size(); ++i) {
      const double u = rep.eval_component(i, x);
      v += u * u;
    }
    A.at(g, g) += 30.0 * inv12h2 - 2.0 * v;
    if (g >= 1) A.at(g, g - 1) += -16.0 * inv12h2;
    if (g >= 2) A.at(g, g - 2) += inv12h2;
  }
  return A;
}

// Sample an analytic candidate on the grid as one long interleaved vector.
Eigen::VectorXd sample_candidate(const TangentVector& phi, const GridSpec& grid) {
  const int n = phi.size();
  Eigen::VectorXd v(n * grid.n_points);
  for (int g = 0; g < grid.n_points; ++g)
    for (int i = 0; i < n; ++i) v[g * n + i] = phi.comp(i).value(grid.point(g));
  return v;
}

}  // namespace

KernelReport kernel_dimension(const SolutionRep& rep, const GridSpec& grid,
                              const ThresholdPolicy& policy) {
  const int n = rep.size();
  const BandedSymMatrix A = assemble_linearized(rep, grid);
  const double norm = A.inf_norm();

  // analytic kernel candidates: parameter tangents when defined, the
  // translation vector, and a rotation for every equal-mu pair
  std::vector<TangentVector> cands;
  bool all_nonzero = true;
  for (double a : rep.params().a) all_nonzero = all_nonzero && a != 0.0;
  if (all_nonzero)
    for (auto& tv : tangent_vectors(rep)) cands.push_back(std::move(tv));
  cands.push_back(translation_vector(rep));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rep.spectrum().mu(i) == rep.spectrum().mu(j) &&
          rep.params().a[static_cast<std::size_t>(i)] != 0.0 &&
          rep.params().a[static_cast<std::size_t>(j)] != 0.0)
        cands.push_back(rotation_kernel(rep, i, j));

  KernelReport report;
  Eigen::MatrixXd C(A.size(), static_cast<int>(cands.size()));
  Eigen::VectorXd Av(A.size());
  for (std::size_t c = 0; c < cands.size(); ++c) {
    report.analytic_residual_sup =
        std::max(report.analytic_residual_sup, linearized_residual_sup(rep, cands[c], grid));
    Eigen::VectorXd v = sample_candidate(cands[c], grid);
    A.multiply(v, Av);
    report.rayleigh_bound = std::max(report.rayleigh_bound, Av.norm() / v.norm());
    C.col(static_cast<int>(c)) = v / v.norm();
  }

  const int k = std::min(A.size(), n + policy.extra_eigs);
  std::vector<EigPair> pairs;
  if (A.size() <= 900)
    pairs = eigs_dense(A, k, 0.0);
  else
    pairs = eigs_smallest(A, k, 0.0);

  report.threshold = policy.epsilon * norm;
  for (const EigPair& p : pairs) report.eigenvalues_near_zero.push_back(p.value);
  int dim = 0;
  for (const EigPair& p : pairs)
    if (std::abs(p.value) < report.threshold) ++dim;
  report.discrete_kernel_dim = dim;

  // largest principal angle between the analytic span and the discrete
  // near-zero eigenspace
  if (dim > 0 && cands.size() > 0) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qra(C);
    Eigen::MatrixXd R = qra.matrixQR().topRows(C.cols()).triangularView<Eigen::Upper>();
    int rank = 0;
    for (int c = 0; c < C.cols(); ++c)
      if (std::abs(R(c, c)) > 1e-10) ++rank;
    Eigen::MatrixXd Qa = qra.householderQ() * Eigen::MatrixXd::Identity(A.size(), rank);
    Eigen::MatrixXd Qe(A.size(), dim);
    for (int c = 0; c < dim; ++c) Qe.col(c) = pairs[static_cast<std::size_t>(c)].vector;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Qa.transpose() * Qe);
    const int r = std::min(rank, dim);
    const double smin = svd.singularValues()[r - 1];
    report.subspace_angle = std::acos(std::clamp(smin, -1.0, 1.0));
  } else {
    report.subspace_angle = M_PI / 2.0;
  }
  return report;
}

std::vector<double> scalar_spectrum(const SolutionRep& rep, int n_eigs, const GridSpec& grid) {
  if (n_eigs < 1) throw std::invalid_argument("scalar_spectrum: n_eigs must be positive");
  const BandedSymMatrix A = assemble_scalar(rep, grid);
  double vmax = 0.0;
  for (int g = 0; g < grid.n_points; ++g) {
    double v = 0.0;
    for (int i = 0; i < rep.size(); ++i) {
      const double u = rep.eval_component(i, grid.point(g));
      v += u * u;
    }
    vmax = std::max(vmax, v);
  }
  const double shift = -2.0 * vmax - 1.0;  // below the whole spectrum
  const int k = std::min(A.size(), n_eigs + 4);
  std::vector<EigPair> pairs;
  if (A.size() <= 900)
    pairs = eigs_dense(A, k, shift);
  else
    pairs = eigs_smallest(A, k, shift);
  std::vector<double> vals;
  for (const EigPair& p : pairs) vals.push_back(p.value);
  std::sort(vals.begin(), vals.end());
  vals.resize(static_cast<std::size_t>(n_eigs));
  return vals;
}

}  // namespace soliton
