#ifndef SOLITON_INVARIANTS_HPP
#define SOLITON_INVARIANTS_HPP

#include <vector>

#include "soliton/exppoly.hpp"
#include "soliton/hirota.hpp"
#include "soliton/numeric.hpp"

namespace soliton {

// (u_i, u_i', u_i'') for every component at x.
std::vector<ExpRatio::Jet> solution_jets(const SolutionRep& rep, double x);

// r_i(x) = u_i'' + 2 (sum_k u_k^2) u_i + mu_i u_i; identically 0 on solutions.
std::vector<double> residual(const SolutionRep& rep, double x);
double residual_sup(const SolutionRep& rep, const GridSpec& grid);

// k-th constant of motion (k = 1..N), one uniform family:
//   sum_{|J|=k-2, J ∌ l,m; l<m} mu_J (u_l'u_m - u_l u_m')^2
// + (sum_i u_i^2) sum_{|J|=k-1, J ∌ j} mu_J u_j^2
// + sum_{|J|=k-1, J ∌ j} mu_J (u_j')^2
// + sum_{|J|=k-1, J ∌ j} mu_J mu_j u_j^2  = 0.
// k=1 and k=2 reduce to the energy-type and Wronskian-type identities; the
// exclusion sums are evaluated through downdated elementary symmetric
// polynomials.  `scale` is the largest single summand in magnitude, the
// reference for scale-relative tolerances (large terms may cancel exactly).
struct MotionValue {
  double value = 0.0;
  double scale = 0.0;
};
MotionValue motion_constant(const SolutionRep& rep, int k, double x);

// Same identity on raw state data (u_i, u_i'); the formula is defined for
// arbitrary states, not only solutions.
MotionValue motion_constant_data(const std::vector<double>& mus, const std::vector<double>& u,
                                 const std::vector<double>& du, int k);

struct MotionReport {
  int order = 0;
  double sup_abs = 0.0;
  double sup_scale = 0.0;
  GridSpec grid;
};
MotionReport motion_report(const SolutionRep& rep, int k, const GridSpec& grid);

// Elementary symmetric polynomials e_0..e_n of `vals`, and the downdate that
// removes one value (synthetic division of the generating polynomial).
std::vector<double> elem_sym(const std::vector<double>& vals);
std::vector<double> elem_sym_exclude(const std::vector<double>& e, double v);

// Tau denominator of the subsystem with component i removed; its ratio with f
// is the antiderivative of -u_i^2/(2 eta_i).
ExpPoly reduced_tau(const SolutionRep& rep, int i);

// sup over the grid of |d/dx (reduced_tau/f) + u_i^2 / (2 eta_i)|; the
// exact-algebra validation of the antiderivative identity for any N.
double antiderivative_defect(const SolutionRep& rep, int i, const GridSpec& grid);

enum class MassMethod { analytic, quadrature };

// ∫ u_i^2 dx.  analytic: boundary values of the antiderivative ratio,
// mass = 2 eta_i (1 - L) with L the ratio of the leading tau coefficients;
// equals 2 eta_i when the mu are distinct and every a_j != 0, and the true
// grouped integral in the degenerate cases.  quadrature: adaptive rule on
// [-25/eta_min, 25/eta_min].
double mass(const SolutionRep& rep, int i, MassMethod method = MassMethod::analytic);

// sum_n |mu_n|^{1/2} - (1/4) ∫ V_+ dx with V = 2 sum_n u_n^2.
double lieb_thirring_gap(const SolutionRep& rep);

struct Energy {
  double kinetic = 0.0;  // sum_k ∫ (u_k')^2
  double quartic = 0.0;  // ∫ (sum_k u_k^2)^2
  double value() const { return kinetic - quartic; }
};
Energy energy(const SolutionRep& rep);

}  // namespace soliton

#endif
