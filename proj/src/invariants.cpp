#include "soliton/invariants.hpp"

#include <algorithm>
#include <cmath>

#include "soliton/errors.hpp"

namespace soliton {

std::vector<ExpRatio::Jet> solution_jets(const SolutionRep& rep, double x) {
  std::vector<ExpRatio::Jet> jets(static_cast<std::size_t>(rep.size()));
  for (int i = 0; i < rep.size(); ++i) jets[static_cast<std::size_t>(i)] = rep.component(i).jet(x);
  return jets;
}

std::vector<double> residual(const SolutionRep& rep, double x) {
  const auto jets = solution_jets(rep, x);
  double v = 0.0;
  for (const auto& j : jets) v += j.v * j.v;
  std::vector<double> r(jets.size());
  for (int i = 0; i < rep.size(); ++i) {
    const auto& j = jets[static_cast<std::size_t>(i)];
    r[static_cast<std::size_t>(i)] = j.d2 + 2.0 * v * j.v + rep.spectrum().mu(i) * j.v;
  }
  return r;
}

double residual_sup(const SolutionRep& rep, const GridSpec& grid) {
  double sup = 0.0;
  for (int m = 0; m < grid.n_points; ++m) {
    for (double ri : residual(rep, grid.point(m))) sup = std::max(sup, std::abs(ri));
  }
  return sup;
}

std::vector<double> elem_sym(const std::vector<double>& vals) {
  std::vector<double> e(vals.size() + 1, 0.0);
  e[0] = 1.0;
  std::size_t deg = 0;
  for (double v : vals) {
    ++deg;
    for (std::size_t m = deg; m >= 1; --m) e[m] += v * e[m - 1];
  }
  return e;
}

std::vector<double> elem_sym_exclude(const std::vector<double>& e, double v) {
  std::vector<double> out(e.size() - 1, 0.0);
  out[0] = 1.0;
  for (std::size_t m = 1; m < out.size(); ++m) out[m] = e[m] - v * out[m - 1];
  return out;
}

MotionValue motion_constant_data(const std::vector<double>& mus, const std::vector<double>& u,
                                 const std::vector<double>& du, int k) {
  const int n = static_cast<int>(mus.size());
  if (k < 1 || k > n) throw OrderOutOfRange("motion_constant: k must lie in 1..N");
  if (u.size() != mus.size() || du.size() != mus.size())
    throw SizeMismatch("motion_constant: state length mismatch");
  const std::vector<double> e = elem_sym(mus);

  double usq = 0.0;
  for (double ui : u) usq += ui * ui;

  MotionValue mv;
  auto accumulate = [&mv](double term) {
    mv.value += term;
    mv.scale = std::max(mv.scale, std::abs(term));
  };

  // Wronskian block: |J| = k-2 excluding the pair.
  if (k >= 2) {
    for (int l = 0; l < n; ++l) {
      const std::vector<double> el = elem_sym_exclude(e, mus[static_cast<std::size_t>(l)]);
      for (int m = l + 1; m < n; ++m) {
        const std::vector<double> elm = elem_sym_exclude(el, mus[static_cast<std::size_t>(m)]);
        const double w = du[static_cast<std::size_t>(l)] * u[static_cast<std::size_t>(m)] -
                         u[static_cast<std::size_t>(l)] * du[static_cast<std::size_t>(m)];
        accumulate(elm[static_cast<std::size_t>(k - 2)] * w * w);
      }
    }
  }
  // index blocks: |J| = k-1 excluding j.
  for (int j = 0; j < n; ++j) {
    const std::vector<double> ej = elem_sym_exclude(e, mus[static_cast<std::size_t>(j)]);
    const double c = ej[static_cast<std::size_t>(k - 1)];
    const double uj = u[static_cast<std::size_t>(j)], duj = du[static_cast<std::size_t>(j)];
    accumulate(usq * c * uj * uj);
    accumulate(c * duj * duj);
    accumulate(c * mus[static_cast<std::size_t>(j)] * uj * uj);
  }
  return mv;
}

MotionValue motion_constant(const SolutionRep& rep, int k, double x) {
  const auto jets = solution_jets(rep, x);
  std::vector<double> u(jets.size()), du(jets.size());
  for (std::size_t i = 0; i < jets.size(); ++i) {
    u[i] = jets[i].v;
    du[i] = jets[i].d1;
  }
  return motion_constant_data(rep.spectrum().mus(), u, du, k);
}

MotionReport motion_report(const SolutionRep& rep, int k, const GridSpec& grid) {
  MotionReport rep_out;
  rep_out.order = k;
  rep_out.grid = grid;
  for (int m = 0; m < grid.n_points; ++m) {
    const MotionValue mv = motion_constant(rep, k, grid.point(m));
    rep_out.sup_abs = std::max(rep_out.sup_abs, std::abs(mv.value));
    rep_out.sup_scale = std::max(rep_out.sup_scale, mv.scale);
  }
  return rep_out;
}

ExpPoly reduced_tau(const SolutionRep& rep, int i) {
  const int n = rep.size();
  if (i < 0 || i >= n) throw IndexOutOfRange("reduced_tau: component index");
  if (n == 1) return ExpPoly::constant(1.0);
  std::vector<double> mu;
  SolitonParams pr;
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    mu.push_back(rep.spectrum().mu(j));
    pr.a.push_back(rep.params().a[static_cast<std::size_t>(j)]);
  }
  // The reduced subset sums add the same eta doubles in the same index order,
  // so rates match the full tau bitwise where they coincide mathematically.
  return build_solution(Spectrum(std::move(mu)), pr).f();
}

double antiderivative_defect(const SolutionRep& rep, int i, const GridSpec& grid) {
  const ExpRatio ratio(reduced_tau(rep, i), rep.f());
  const double inv2eta = 1.0 / (2.0 * rep.spectrum().eta(i));
  double sup = 0.0;
  for (int m = 0; m < grid.n_points; ++m) {
    const double x = grid.point(m);
    const double u = rep.eval_component(i, x);
    sup = std::max(sup, std::abs(ratio.jet(x).d1 + u * u * inv2eta));
  }
  return sup;
}

double mass(const SolutionRep& rep, int i, MassMethod method) {
  const int n = rep.size();
  if (i < 0 || i >= n) throw IndexOutOfRange("mass: component index");
  if (method == MassMethod::quadrature) {
    const GridSpec grid = GridSpec::for_spectrum(rep.spectrum());
    auto integrand = [&rep, i](double x) {
      const double u = rep.eval_component(i, x);
      return u * u;
    };
    return integrate(integrand, -grid.half_width, grid.half_width, 1e-9);
  }
  // mass = -2 eta_i [reduced/f]_{-inf}^{+inf} = 2 eta_i (1 - L); both tau
  // functions have constant term 1, and L is the ratio of the coefficients at
  // the leading rate of f (0 when the reduced tau lacks that rate).
  const ExpPoly fm = reduced_tau(rep, i);
  const ExpTerm& lead = rep.f().terms().back();
  double lm = 0.0;
  for (const ExpTerm& t : fm.terms())
    if (t.rate == lead.rate) lm = t.coeff;
  const double L = lm / lead.coeff;
  return 2.0 * rep.spectrum().eta(i) * (1.0 - L);
}

double lieb_thirring_gap(const SolutionRep& rep) {
  double lhs = 0.0;
  for (double eta : rep.spectrum().etas()) lhs += eta;
  const GridSpec grid = GridSpec::for_spectrum(rep.spectrum());
  auto vplus = [&rep](double x) {
    double v = 0.0;
    for (int i = 0; i < rep.size(); ++i) {
      const double u = rep.eval_component(i, x);
      v += u * u;
    }
    return std::max(2.0 * v, 0.0);
  };
  const double integral = integrate(vplus, -grid.half_width, grid.half_width, 1e-9);
  return lhs - 0.25 * integral;
}

Energy energy(const SolutionRep& rep) {
  const GridSpec grid = GridSpec::for_spectrum(rep.spectrum());
  Energy e;
  auto kin = [&rep](double x) {
    double s = 0.0;
    for (int i = 0; i < rep.size(); ++i) {
      const double d = rep.component(i).jet(x).d1;
      s += d * d;
    }
    return s;
  };
  auto quart = [&rep](double x) {
    double v = 0.0;
    for (int i = 0; i < rep.size(); ++i) {
      const double u = rep.eval_component(i, x);
      v += u * u;
    }
    return v * v;
  };
  e.kinetic = integrate(kin, -grid.half_width, grid.half_width, 1e-9);
  e.quartic = integrate(quart, -grid.half_width, grid.half_width, 1e-9);
  return e;
}

}  // namespace soliton
