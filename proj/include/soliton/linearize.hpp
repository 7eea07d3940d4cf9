#ifndef SOLITON_LINEARIZE_HPP
#define SOLITON_LINEARIZE_HPP

#include <vector>

#include "soliton/hirota.hpp"
#include "soliton/invariants.hpp"
#include "soliton/numeric.hpp"

namespace soliton {

// Candidate kernel element of the linearized system: N components, each an
// exact rational of exponential polynomials (tangent vectors live over f^2,
// rotation and translation vectors over f).
class TangentVector {
 public:
  explicit TangentVector(std::vector<ExpRatio> comps) : comp_(std::move(comps)) {}
  int size() const { return static_cast<int>(comp_.size()); }
  const ExpRatio& comp(int i) const { return comp_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<ExpRatio> comp_;
};

// phi^(j) = du/da_j, exact: (d_{a_j}g_i f - g_i d_{a_j}f) / f^2.
// Requires every a_i != 0.
std::vector<TangentVector> tangent_vectors(const SolutionRep& rep);

// (u_1', ..., u_N'); always solves the linearized system.
TangentVector translation_vector(const SolutionRep& rep);

// -u_j in slot i, u_i in slot j, zeros elsewhere; needs mu_i = mu_j exactly.
TangentVector rotation_kernel(const SolutionRep& rep, int i, int j);

// l_i = phi_i'' + 2(sum u_k^2) phi_i + 4(sum u_k phi_k) u_i + mu_i phi_i.
std::vector<double> linearized_residual(const SolutionRep& rep, const TangentVector& phi,
                                        double x);
double linearized_residual_sup(const SolutionRep& rep, const TangentVector& phi,
                               const GridSpec& grid);

// Bilinear constants of motion, the first variation of the nonlinear ones
// (k = 1..N); vanish when phi solves the linearized system and decays.
MotionValue linearized_motion_constant(const SolutionRep& rep, const TangentVector& phi, int k,
                                       double x);
MotionValue linearized_motion_constant_data(const std::vector<double>& mus,
                                            const std::vector<double>& u,
                                            const std::vector<double>& du,
                                            const std::vector<double>& phi,
                                            const std::vector<double>& dphi, int k);
MotionReport linearized_motion_report(const SolutionRep& rep, const TangentVector& phi, int k,
                                      const GridSpec& grid);

struct ThresholdPolicy {
  double epsilon = 1e-6;  // near-zero cut: |lambda| < epsilon * ||A||_inf
  int extra_eigs = 4;     // eigenvalues computed beyond N, to expose the gap
};

struct KernelReport {
  double analytic_residual_sup = 0.0;        // worst residual of the analytic candidates
  int discrete_kernel_dim = 0;               // eigenvalues below the threshold
  std::vector<double> eigenvalues_near_zero; // ascending |lambda|
  double threshold = 0.0;
  double subspace_angle = 0.0;   // largest principal angle, analytic span vs discrete kernel
  double rayleigh_bound = 0.0;   // max ||A phi_h|| / ||phi_h|| over analytic candidates
};

// Discretizes the linearized system on the grid (4th-order stencil, Dirichlet
// ends, component-interleaved banded operator), counts near-zero eigenvalues
// and cross-checks the analytic kernel candidates against the discrete
// eigenspace.
KernelReport kernel_dimension(const SolutionRep& rep, const GridSpec& grid,
                              const ThresholdPolicy& policy = {});

// Lowest n_eigs eigenvalues of the scalar operator L_u = -d^2/dx^2 - 2 sum u_k^2.
std::vector<double> scalar_spectrum(const SolutionRep& rep, int n_eigs, const GridSpec& grid);

}  // namespace soliton

#endif
