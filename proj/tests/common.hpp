#ifndef SOLITON_TESTS_COMMON_HPP
#define SOLITON_TESTS_COMMON_HPP

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "soliton/hirota.hpp"

namespace soliton_tests {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

// Strictly decreasing eta in [eta_lo, eta_hi] with a minimum gap, so the tau
// coefficients stay well conditioned.
inline soliton::Spectrum random_strict_spectrum(std::mt19937_64& rng, int n, double eta_lo = 0.5,
                                                double eta_hi = 2.2, double min_gap = 0.08) {
  std::vector<double> eta;
  while (true) {
    eta.clear();
    for (int i = 0; i < n; ++i) eta.push_back(uniform(rng, eta_lo, eta_hi));
    std::sort(eta.begin(), eta.end(), std::greater<>());
    bool ok = true;
    for (int i = 0; i + 1 < n; ++i) ok = ok && (eta[static_cast<std::size_t>(i)] -
                                                eta[static_cast<std::size_t>(i + 1)] >= min_gap);
    if (ok) break;
  }
  std::vector<double> mu;
  for (double e : eta) mu.push_back(-e * e);
  return soliton::Spectrum(mu);
}

inline soliton::SolitonParams random_params(std::mt19937_64& rng, int n, double lo = -5.0,
                                            double hi = 5.0, double min_abs = 0.05) {
  soliton::SolitonParams pr;
  for (int i = 0; i < n; ++i) {
    double a = 0.0;
    while (std::abs(a) < min_abs) a = uniform(rng, lo, hi);
    pr.a.push_back(a);
  }
  return pr;
}

inline double sup_component_diff(const soliton::SolutionRep& a, const soliton::SolutionRep& b,
                                 double lo, double hi, int n, double shift_b = 0.0) {
  double sup = 0.0;
  for (int m = 0; m < n; ++m) {
    const double x = lo + (hi - lo) * m / (n - 1);
    for (int i = 0; i < a.size(); ++i)
      sup = std::max(sup, std::abs(a.eval_component(i, x) - b.eval_component(i, x + shift_b)));
  }
  return sup;
}

}  // namespace soliton_tests

#endif
