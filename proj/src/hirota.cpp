#include "soliton/hirota.hpp"

#include <cmath>
#include <utility>

#include "soliton/errors.hpp"

namespace soliton {

Spectrum::Spectrum(std::vector<double> mu) : mu_(std::move(mu)) {
  if (mu_.empty()) throw std::invalid_argument("Spectrum: needs at least one component");
  for (std::size_t i = 0; i < mu_.size(); ++i) {
    if (!(mu_[i] < 0.0)) throw std::invalid_argument("Spectrum: every mu_i must be negative");
    if (i > 0 && mu_[i] < mu_[i - 1])
      throw std::invalid_argument("Spectrum: mu must be sorted ascending (unsorted input rejected)");
  }
  eta_.reserve(mu_.size());
  for (double m : mu_) eta_.push_back(std::sqrt(-m));
}

SolutionRep::SolutionRep(Spectrum spectrum, SolitonParams params, std::vector<ExpPoly> g, ExpPoly f)
    : spectrum_(std::move(spectrum)), params_(std::move(params)), g_(std::move(g)), f_(std::move(f)) {
  comp_.reserve(g_.size());
  for (const ExpPoly& gi : g_) comp_.emplace_back(gi, f_);
}

SolutionRep SolutionRep::from_parts(Spectrum spectrum, SolitonParams params,
                                    std::vector<ExpPoly> g, ExpPoly f) {
  if (g.size() != static_cast<std::size_t>(spectrum.size()) ||
      params.a.size() != static_cast<std::size_t>(spectrum.size()))
    throw SizeMismatch("SolutionRep: component count mismatch");
  if (f.is_zero() || f.terms().front().rate != 0.0 || f.terms().front().coeff != 1.0)
    throw std::invalid_argument("SolutionRep: tau denominator must have constant term 1");
  for (const ExpTerm& t : f.terms())
    if (t.coeff < 0.0) throw std::invalid_argument("SolutionRep: tau denominator must be positive");
  return SolutionRep(std::move(spectrum), std::move(params), std::move(g), std::move(f));
}

const ExpPoly& SolutionRep::g(int i) const {
  if (i < 0 || i >= size()) throw IndexOutOfRange("SolutionRep::g: component index");
  return g_[static_cast<std::size_t>(i)];
}

const ExpRatio& SolutionRep::component(int i) const {
  if (i < 0 || i >= size()) throw IndexOutOfRange("SolutionRep::component: component index");
  return comp_[static_cast<std::size_t>(i)];
}

double SolutionRep::eval_component(int i, double x) const { return component(i).value(x); }

ExpRatio::Jet SolutionRep::component_jet(int i, double x) const { return component(i).jet(x); }

namespace {

int lowest_bit_index(unsigned mask) { return __builtin_ctz(mask); }

// Subset data shared by f, the g_i and the parameter derivatives.  Built
// incrementally over the mask lattice: each mask extends mask^lowbit by one
// element, so coefficients and rates cost O(N) per subset and rates for
// mathematically equal sums come out bitwise identical (same doubles added in
// the same index order), which is what exact-rate merging relies on.
struct SubsetTables {
  std::vector<double> coef;              // f coefficient of each subset
  std::vector<double> rate;              // 2 sum_{j in J} eta_j
  std::vector<std::vector<double>> prodA;  // prodA[i][J] = prod_{j in J} A(i,j)

  SubsetTables(const Spectrum& sp, const SolitonParams& pr) {
    const int n = sp.size();
    const unsigned total = 1u << n;
    coef.assign(total, 0.0);
    rate.assign(total, 0.0);
    coef[0] = 1.0;
    auto A = [&](int i, int j) { return (sp.eta(i) - sp.eta(j)) / (sp.eta(i) + sp.eta(j)); };
    for (unsigned mask = 1; mask < total; ++mask) {
      const int t = lowest_bit_index(mask);
      const unsigned rest = mask & (mask - 1);
      double pair2 = 1.0;
      for (int j = t + 1; j < n; ++j)
        if (rest & (1u << j)) {
          const double atj = A(t, j);
          pair2 *= atj * atj;
        }
      const double at = pr.a[static_cast<std::size_t>(t)];
      coef[mask] = coef[rest] * (at * at / (4.0 * sp.eta(t) * sp.eta(t))) * pair2;
      rate[mask] = 2.0 * sp.eta(t) + rate[rest];
    }
    prodA.assign(static_cast<std::size_t>(n), {});
    for (int i = 0; i < n; ++i) {
      auto& pi = prodA[static_cast<std::size_t>(i)];
      pi.assign(total, 1.0);
      for (unsigned mask = 1; mask < total; ++mask) {
        const int t = lowest_bit_index(mask);
        pi[mask] = pi[mask & (mask - 1)] * (t == i ? 1.0 : A(i, t));
      }
    }
  }
};

void check_shape(const Spectrum& spectrum, const SolitonParams& params) {
  if (params.a.size() != static_cast<std::size_t>(spectrum.size()))
    throw SizeMismatch("build_solution: params length differs from spectrum size");
  if (spectrum.size() > kMaxComponents)
    throw NTooLarge("build_solution: N exceeds the 2^N term enumeration cap of 16");
}

}  // namespace

SolutionRep build_solution(const Spectrum& spectrum, const SolitonParams& params) {
  check_shape(spectrum, params);
  const int n = spectrum.size();
  const unsigned total = 1u << n;
  SubsetTables tab(spectrum, params);

  std::vector<ExpTerm> fterms;
  fterms.reserve(total);
  for (unsigned mask = 0; mask < total; ++mask) fterms.push_back({tab.coef[mask], tab.rate[mask]});
  ExpPoly f = ExpPoly::from_terms(std::move(fterms));

  std::vector<ExpPoly> g;
  g.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double ai = params.a[static_cast<std::size_t>(i)];
    std::vector<ExpTerm> terms;
    terms.reserve(total >> 1);
    for (unsigned mask = 0; mask < total; ++mask) {
      if (mask & (1u << i)) continue;
      terms.push_back({ai * tab.coef[mask] * tab.prodA[static_cast<std::size_t>(i)][mask],
                       spectrum.eta(i) + tab.rate[mask]});
    }
    g.push_back(ExpPoly::from_terms(std::move(terms)));
  }
  return SolutionRep::from_parts(spectrum, params, std::move(g), std::move(f));
}

SolitonParams translate_params(const Spectrum& spectrum, const SolitonParams& params, double c) {
  if (params.a.size() != static_cast<std::size_t>(spectrum.size()))
    throw SizeMismatch("translate_params: params length differs from spectrum size");
  SolitonParams out = params;
  for (int i = 0; i < spectrum.size(); ++i)
    out.a[static_cast<std::size_t>(i)] *= std::exp(spectrum.eta(i) * c);
  return out;
}

ParamDerivative partial_wrt_param(const SolutionRep& rep, int t) {
  const Spectrum& sp = rep.spectrum();
  const int n = sp.size();
  if (t < 0 || t >= n) throw IndexOutOfRange("partial_wrt_param: parameter index");
  const double at = rep.params().a[static_cast<std::size_t>(t)];
  if (at == 0.0) throw ZeroParameter("partial_wrt_param: a_t = 0 has no manifold derivative");

  SubsetTables tab(sp, rep.params());
  const unsigned total = 1u << n;
  const unsigned tbit = 1u << t;

  ParamDerivative out;
  std::vector<ExpTerm> dfterms;
  for (unsigned mask = 0; mask < total; ++mask)
    if (mask & tbit) dfterms.push_back({tab.coef[mask] * 2.0 / at, tab.rate[mask]});
  out.df = ExpPoly::from_terms(std::move(dfterms));

  out.dg.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double ai = rep.params().a[static_cast<std::size_t>(i)];
    std::vector<ExpTerm> terms;
    for (unsigned mask = 0; mask < total; ++mask) {
      if (mask & (1u << i)) continue;
      const double base = tab.coef[mask] * tab.prodA[static_cast<std::size_t>(i)][mask];
      if (i == t) {
        terms.push_back({base, sp.eta(i) + tab.rate[mask]});  // d/da_i of a_i * (...)
      } else if (mask & tbit) {
        terms.push_back({ai * base * 2.0 / at, sp.eta(i) + tab.rate[mask]});
      }
    }
    out.dg.push_back(ExpPoly::from_terms(std::move(terms)));
  }
  return out;
}

}  // namespace soliton
