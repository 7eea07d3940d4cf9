#ifndef SOLITON_HIROTA_HPP
#define SOLITON_HIROTA_HPP

#include <vector>

#include "soliton/exppoly.hpp"

namespace soliton {

// Chemical potentials mu_1 <= ... <= mu_N < 0 and decay rates
// eta_i = sqrt(-mu_i) (descending).  Unsorted input is rejected rather than
// sorted, so the pairing with the parameter vector stays unambiguous.
class Spectrum {
 public:
  explicit Spectrum(std::vector<double> mu);

  int size() const { return static_cast<int>(mu_.size()); }
  double mu(int i) const { return mu_[static_cast<std::size_t>(i)]; }
  double eta(int i) const { return eta_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& mus() const { return mu_; }
  const std::vector<double>& etas() const { return eta_; }
  double eta_min() const { return eta_.back(); }
  double eta_max() const { return eta_.front(); }

 private:
  std::vector<double> mu_, eta_;
};

// Soliton amplitude parameters (a_1,...,a_N); component u_i vanishes
// identically iff a_i = 0.
struct SolitonParams {
  std::vector<double> a;
};

// Exact N-soliton bound state u_i = g_i / f in tau-function form.
// Invariants: f has constant term exactly 1 and all coefficients >= 0, so
// f >= 1 everywhere; g_i is identically zero iff a_i = 0.
class SolutionRep {
 public:
  int size() const { return spectrum_.size(); }
  const Spectrum& spectrum() const { return spectrum_; }
  const SolitonParams& params() const { return params_; }
  const ExpPoly& g(int i) const;
  const ExpPoly& f() const { return f_; }
  const ExpRatio& component(int i) const;

  double eval_component(int i, double x) const;   // u_i(x)
  ExpRatio::Jet component_jet(int i, double x) const;  // u_i, u_i', u_i''

  static SolutionRep from_parts(Spectrum spectrum, SolitonParams params,
                                std::vector<ExpPoly> g, ExpPoly f);

 private:
  SolutionRep(Spectrum spectrum, SolitonParams params, std::vector<ExpPoly> g, ExpPoly f);
  Spectrum spectrum_;
  SolitonParams params_;
  std::vector<ExpPoly> g_;
  ExpPoly f_;
  std::vector<ExpRatio> comp_;
};

inline constexpr int kMaxComponents = 16;  // 2^N tau terms

// Tau-function constructor: over subsets J of {1..N},
//   f   = sum_J prod_{j in J} a_j^2/(4 eta_j^2)
//               prod_{j<k in J} ((eta_j-eta_k)/(eta_j+eta_k))^2  e^{2 sum_J eta_j x}
//   g_i = a_i e^{eta_i x} sum_{J excluding i}
//               prod_{j in J} a_j^2 (eta_i-eta_j)/(4 eta_j^2 (eta_i+eta_j))
//               prod_{j<k in J} ((eta_j-eta_k)/(eta_j+eta_k))^2  e^{2 sum_J eta_j x}
// Equal eta values need no special casing: the vanishing difference factors
// collapse the sum to the degenerate closed forms automatically.
SolutionRep build_solution(const Spectrum& spectrum, const SolitonParams& params);

// a_i -> a_i e^{eta_i c}; the rebuilt solution equals the original shifted:
// u(x; a') = u(x + c; a).
SolitonParams translate_params(const Spectrum& spectrum, const SolitonParams& params, double c);

// Exact partial derivatives of the tau polynomials with respect to a_t.
// Requires a_t != 0 (the coefficients are polynomial in the a's; dividing the
// stored subset coefficients by a_t keeps the construction incremental).
struct ParamDerivative {
  std::vector<ExpPoly> dg;
  ExpPoly df;
};
ParamDerivative partial_wrt_param(const SolutionRep& rep, int t);

}  // namespace soliton

#endif
