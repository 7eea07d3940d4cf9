#include <cmath>
#include <random>

#include "common.hpp"
#include "doctest.h"
#include "soliton/errors.hpp"
#include "soliton/invariants.hpp"
#include "soliton/linearize.hpp"

using namespace soliton;
using namespace soliton_tests;

namespace {

// the three bilinear identities written out literally (N = 3)
double lin_identity1_n3(const std::vector<double>& mu, const std::vector<double>& u,
                        const std::vector<double>& du, const std::vector<double>& ph,
                        const std::vector<double>& dph) {
  const double usq = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
  const double uphi = u[0] * ph[0] + u[1] * ph[1] + u[2] * ph[2];
  return du[0] * dph[0] + du[1] * dph[1] + du[2] * dph[2] + 2.0 * usq * uphi +
         mu[0] * u[0] * ph[0] + mu[1] * u[1] * ph[1] + mu[2] * u[2] * ph[2];
}

double wdot(const std::vector<double>& u, const std::vector<double>& du,
            const std::vector<double>& ph, const std::vector<double>& dph, int j, int k) {
  const std::size_t js = static_cast<std::size_t>(j), ks = static_cast<std::size_t>(k);
  return dph[js] * u[ks] + du[js] * ph[ks] - ph[js] * du[ks] - u[js] * dph[ks];
}

double wr(const std::vector<double>& u, const std::vector<double>& du, int j, int k) {
  const std::size_t js = static_cast<std::size_t>(j), ks = static_cast<std::size_t>(k);
  return du[js] * u[ks] - u[js] * du[ks];
}

double lin_identity2_n3(const std::vector<double>& mu, const std::vector<double>& u,
                        const std::vector<double>& du, const std::vector<double>& ph,
                        const std::vector<double>& dph) {
  const double usq = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
  const double uphi = u[0] * ph[0] + u[1] * ph[1] + u[2] * ph[2];
  double acc = 0.0;
  acc += wr(u, du, 0, 1) * wdot(u, du, ph, dph, 0, 1);
  acc += wr(u, du, 0, 2) * wdot(u, du, ph, dph, 0, 2);
  acc += wr(u, du, 1, 2) * wdot(u, du, ph, dph, 1, 2);
  acc += usq * ((mu[1] + mu[2]) * u[0] * ph[0] + (mu[0] + mu[2]) * u[1] * ph[1] +
                (mu[0] + mu[1]) * u[2] * ph[2]);
  acc += uphi * ((mu[1] + mu[2]) * u[0] * u[0] + (mu[0] + mu[2]) * u[1] * u[1] +
                 (mu[0] + mu[1]) * u[2] * u[2]);
  acc += (mu[1] + mu[2]) * du[0] * dph[0] + (mu[0] + mu[2]) * du[1] * dph[1] +
         (mu[0] + mu[1]) * du[2] * dph[2];
  acc += mu[0] * (mu[1] + mu[2]) * u[0] * ph[0] + mu[1] * (mu[0] + mu[2]) * u[1] * ph[1] +
         mu[2] * (mu[0] + mu[1]) * u[2] * ph[2];
  return acc;
}

double lin_identity3_n3(const std::vector<double>& mu, const std::vector<double>& u,
                        const std::vector<double>& du, const std::vector<double>& ph,
                        const std::vector<double>& dph) {
  const double usq = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
  const double uphi = u[0] * ph[0] + u[1] * ph[1] + u[2] * ph[2];
  double acc = 0.0;
  acc += mu[2] * wr(u, du, 0, 1) * wdot(u, du, ph, dph, 0, 1);
  acc += mu[1] * wr(u, du, 0, 2) * wdot(u, du, ph, dph, 0, 2);
  acc += mu[0] * wr(u, du, 1, 2) * wdot(u, du, ph, dph, 1, 2);
  acc += usq * (mu[1] * mu[2] * u[0] * ph[0] + mu[0] * mu[2] * u[1] * ph[1] +
                mu[0] * mu[1] * u[2] * ph[2]);
  acc += uphi * (mu[1] * mu[2] * u[0] * u[0] + mu[0] * mu[2] * u[1] * u[1] +
                 mu[0] * mu[1] * u[2] * u[2]);
  acc += mu[1] * mu[2] * du[0] * dph[0] + mu[0] * mu[2] * du[1] * dph[1] +
         mu[0] * mu[1] * du[2] * dph[2];
  acc += mu[0] * mu[1] * mu[2] * uphi;
  return acc;
}

std::vector<double> random_state(std::mt19937_64& rng, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(uniform(rng, -2.0, 2.0));
  return v;
}

TangentVector component_injection(const SolutionRep& rep, int slot) {
  std::vector<ExpRatio> comps;
  for (int c = 0; c < rep.size(); ++c)
    comps.emplace_back(c == slot ? rep.g(slot) : ExpPoly(), rep.f());
  return TangentVector(std::move(comps));
}

}  // namespace

TEST_CASE("linearized identities match the hand-coded N=3 displays") {
  std::mt19937_64 rng(301);
  for (int trial = 0; trial < 300; ++trial) {
    Spectrum sp = random_strict_spectrum(rng, 3);
    const std::vector<double>& mu = sp.mus();
    auto u = random_state(rng, 3), du = random_state(rng, 3);
    auto ph = random_state(rng, 3), dph = random_state(rng, 3);
    CHECK(linearized_motion_constant_data(mu, u, du, ph, dph, 1).value ==
          doctest::Approx(lin_identity1_n3(mu, u, du, ph, dph)).epsilon(1e-12));
    CHECK(linearized_motion_constant_data(mu, u, du, ph, dph, 2).value ==
          doctest::Approx(lin_identity2_n3(mu, u, du, ph, dph)).epsilon(1e-12));
    CHECK(linearized_motion_constant_data(mu, u, du, ph, dph, 3).value ==
          doctest::Approx(lin_identity3_n3(mu, u, du, ph, dph)).epsilon(1e-12));
  }
}

TEST_CASE("linearized identities are the first variation of the nonlinear ones") {
  std::mt19937_64 rng(302);
  const double h = 1e-6;
  for (int n : {3, 4, 5}) {
    for (int trial = 0; trial < 40; ++trial) {
      Spectrum sp = random_strict_spectrum(rng, n, 0.4, 2.2, 0.05);
      auto u = random_state(rng, n), du = random_state(rng, n);
      auto ph = random_state(rng, n), dph = random_state(rng, n);
      for (int k = 1; k <= n; ++k) {
        std::vector<double> up(u), dup(du), um(u), dum(du);
        for (int i = 0; i < n; ++i) {
          up[static_cast<std::size_t>(i)] += h * ph[static_cast<std::size_t>(i)];
          dup[static_cast<std::size_t>(i)] += h * dph[static_cast<std::size_t>(i)];
          um[static_cast<std::size_t>(i)] -= h * ph[static_cast<std::size_t>(i)];
          dum[static_cast<std::size_t>(i)] -= h * dph[static_cast<std::size_t>(i)];
        }
        const double fd = (motion_constant_data(sp.mus(), up, dup, k).value -
                           motion_constant_data(sp.mus(), um, dum, k).value) /
                          (4.0 * h);  // half the variation
        const MotionValue lin = linearized_motion_constant_data(sp.mus(), u, du, ph, dph, k);
        CHECK(lin.value == doctest::Approx(fd).epsilon(1e-5).scale(std::max(lin.scale, 1.0)));
      }
    }
  }
}

TEST_CASE("analytic kernel vectors solve the linearized system") {
  std::mt19937_64 rng(303);
  // generic N=3
  {
    Spectrum sp = random_strict_spectrum(rng, 3);
    SolutionRep rep = build_solution(sp, random_params(rng, 3, -3.0, 3.0));
    GridSpec grid = GridSpec::for_spectrum(sp, 401);
    const double tol = 1e-8 * (1.0 - sp.mu(0));
    CHECK(linearized_residual_sup(rep, translation_vector(rep), grid) < tol);
    auto tvs = tangent_vectors(rep);
    for (const auto& tv : tvs) CHECK(linearized_residual_sup(rep, tv, grid) < tol);
    // tangent vectors are linearly independent: L2 Gram determinant
    Eigen::Matrix3d G;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        double acc = 0.0;
        for (int m = 0; m < grid.n_points; ++m) {
          const double x = grid.point(m);
          for (int i = 0; i < 3; ++i)
            acc += tvs[static_cast<std::size_t>(a)].comp(i).value(x) *
                   tvs[static_cast<std::size_t>(b)].comp(i).value(x);
        }
        G(a, b) = acc * grid.spacing();
      }
    Eigen::Vector3d diag = G.diagonal();
    CHECK(std::abs(G.determinant()) > 1e-8 * diag[0] * diag[1] * diag[2]);
    // negative control: injecting a single component is not in the kernel
    CHECK(linearized_residual_sup(rep, component_injection(rep, 0), grid) > 1e-3);

    // the translation flow is the eta-weighted combination of the parameter
    // tangents: translation = sum_j eta_j a_j d/da_j
    for (double x : {-1.3, 0.0, 2.1}) {
      for (int i = 0; i < 3; ++i) {
        double acc = 0.0;
        for (int j = 0; j < 3; ++j)
          acc += sp.eta(j) * rep.params().a[static_cast<std::size_t>(j)] *
                 tvs[static_cast<std::size_t>(j)].comp(i).value(x);
        CHECK(acc == doctest::Approx(translation_vector(rep).comp(i).value(x)).epsilon(1e-10));
      }
    }
  }
  // N=1: the single tangent spans the kernel
  {
    Spectrum sp({-1.0});
    SolutionRep rep = build_solution(sp, SolitonParams{{2.0}});
    GridSpec grid = GridSpec::for_spectrum(sp, 401);
    for (const auto& tv : tangent_vectors(rep))
      CHECK(linearized_residual_sup(rep, tv, grid) < 1e-10);
  }
  // N=4 tangents
  {
    Spectrum sp = random_strict_spectrum(rng, 4);
    SolutionRep rep = build_solution(sp, random_params(rng, 4, -3.0, 3.0));
    GridSpec grid = GridSpec::for_spectrum(sp, 301);
    const double tol = 1e-8 * (1.0 - sp.mu(0));
    for (const auto& tv : tangent_vectors(rep))
      CHECK(linearized_residual_sup(rep, tv, grid) < tol);
  }
}

TEST_CASE("rotation kernel vectors for equal chemical potentials") {
  std::mt19937_64 rng(304);
  // mu1 = mu2 < mu3: (-u2, u1, 0)
  {
    Spectrum sp({-4.0, -4.0, -1.0});
    SolutionRep rep = build_solution(sp, random_params(rng, 3, -2.0, 2.0));
    GridSpec grid = GridSpec::for_spectrum(sp, 401);
    TangentVector rot = rotation_kernel(rep, 0, 1);
    CHECK(linearized_residual_sup(rep, rot, grid) < 1e-10);
    for (double x : {-2.0, 0.7})
      CHECK(rot.comp(0).value(x) == doctest::Approx(-rep.eval_component(1, x)).epsilon(1e-14));
    CHECK_THROWS_AS(rotation_kernel(rep, 0, 2), UnequalMu);
    CHECK_THROWS_AS(rotation_kernel(rep, 0, 0), IndexOutOfRange);
  }
  // mu1 < mu2 = mu3: (0, -u3, u2)
  {
    Spectrum sp({-4.0, -1.0, -1.0});
    SolutionRep rep = build_solution(sp, random_params(rng, 3, -2.0, 2.0));
    GridSpec grid = GridSpec::for_spectrum(sp, 401);
    CHECK(linearized_residual_sup(rep, rotation_kernel(rep, 1, 2), grid) < 1e-10);
  }
  // all equal: the rotation (-u3, 0, u1) is in the kernel; the non-rotation
  // combination (-u2, 0, u3) is not
  {
    Spectrum sp({-2.25, -2.25, -2.25});
    SolutionRep rep = build_solution(sp, SolitonParams{{1.0, 0.7, -1.2}});
    GridSpec grid = GridSpec::for_spectrum(sp, 401);
    CHECK(linearized_residual_sup(rep, rotation_kernel(rep, 0, 2), grid) < 1e-10);
    std::vector<ExpRatio> bad;
    bad.emplace_back(rep.g(1).scaled(-1.0), rep.f());
    bad.emplace_back(ExpPoly(), rep.f());
    bad.emplace_back(rep.g(2), rep.f());
    CHECK(linearized_residual_sup(rep, TangentVector(std::move(bad)), grid) > 1e-2);
  }
}

TEST_CASE("bilinear identities vanish on kernel vectors") {
  std::mt19937_64 rng(305);
  for (int n : {3, 4}) {
    Spectrum sp = random_strict_spectrum(rng, n);
    SolutionRep rep = build_solution(sp, random_params(rng, n, -3.0, 3.0));
    GridSpec grid = GridSpec::for_spectrum(sp, 201);
    std::vector<TangentVector> vecs = tangent_vectors(rep);
    vecs.push_back(translation_vector(rep));
    for (const auto& tv : vecs)
      for (int k = 1; k <= n; ++k) {
        MotionReport mr = linearized_motion_report(rep, tv, k, grid);
        CHECK(mr.sup_abs < 1e-8 * std::max(mr.sup_scale, 1e-30));
      }
    // phi = 0 gives identically zero
    std::vector<ExpRatio> zero;
    for (int i = 0; i < n; ++i) zero.emplace_back(ExpPoly(), rep.f());
    TangentVector zv(std::move(zero));
    for (int k = 1; k <= n; ++k) CHECK(linearized_motion_constant(rep, zv, k, 0.4).value == 0.0);
    CHECK_THROWS_AS(linearized_motion_constant(rep, zv, 0, 0.0), OrderOutOfRange);
  }
}

TEST_CASE("discrete kernel dimension equals N across multiplicity patterns") {
  std::mt19937_64 rng(306);
  auto check_case = [&](const Spectrum& sp, const SolitonParams& pr, int expected) {
    SolutionRep rep = build_solution(sp, pr);
    GridSpec grid = GridSpec::for_spectrum(sp, 1601);
    KernelReport kr = kernel_dimension(rep, grid);
    CHECK(kr.discrete_kernel_dim == expected);
    CHECK(kr.subspace_angle < 1e-3);
    CHECK(kr.analytic_residual_sup < 1e-8 * (1.0 - sp.mu(0)));
    // clean spectral separation beyond the kernel cluster
    REQUIRE(static_cast<int>(kr.eigenvalues_near_zero.size()) > expected);
    const double inside = std::abs(kr.eigenvalues_near_zero[static_cast<std::size_t>(expected - 1)]);
    const double outside = std::abs(kr.eigenvalues_near_zero[static_cast<std::size_t>(expected)]);
    CHECK(outside > 1e3 * inside);
  };
  check_case(Spectrum({-1.0}), SolitonParams{{2.0}}, 1);
  check_case(random_strict_spectrum(rng, 2), random_params(rng, 2, -3.0, 3.0), 2);
  check_case(random_strict_spectrum(rng, 3), random_params(rng, 3, -3.0, 3.0), 3);
  check_case(Spectrum({-4.0, -4.0, -1.0}), random_params(rng, 3, -2.0, 2.0), 3);
  check_case(Spectrum({-4.0, -1.0, -1.0}), random_params(rng, 3, -2.0, 2.0), 3);
  check_case(Spectrum({-2.25, -2.25, -2.25}), random_params(rng, 3, -2.0, 2.0), 3);
  check_case(random_strict_spectrum(rng, 4), random_params(rng, 4, -3.0, 3.0), 4);
}

TEST_CASE("kernel dimension is mesh independent") {
  std::mt19937_64 rng(307);
  Spectrum sp = random_strict_spectrum(rng, 3);
  SolutionRep rep = build_solution(sp, random_params(rng, 3, -3.0, 3.0));
  KernelReport a = kernel_dimension(rep, GridSpec::for_spectrum(sp, 1201));
  KernelReport b = kernel_dimension(rep, GridSpec::for_spectrum(sp, 2401));
  CHECK(a.discrete_kernel_dim == 3);
  CHECK(b.discrete_kernel_dim == 3);
}

TEST_CASE("scalar operator spectrum recovers every chemical potential") {
  std::mt19937_64 rng(308);
  // N=1: lowest eigenvalue of -d^2/dx^2 - 2 sech^2 is -1
  {
    Spectrum sp({-1.0});
    SolutionRep rep = build_solution(sp, SolitonParams{{2.0}});
    auto vals = scalar_spectrum(rep, 1, GridSpec::for_spectrum(sp, 1601));
    CHECK(vals[0] == doctest::Approx(-1.0).epsilon(1e-4));
  }
  // generic N=3: each mu_i appears
  {
    Spectrum sp = random_strict_spectrum(rng, 3);
    SolutionRep rep = build_solution(sp, random_params(rng, 3, -3.0, 3.0));
    auto vals = scalar_spectrum(rep, 3, GridSpec::for_spectrum(sp, 2001));
    for (int i = 0; i < 3; ++i)
      CHECK(vals[static_cast<std::size_t>(i)] == doctest::Approx(sp.mu(i)).epsilon(2e-4));
  }
  // mu2 = mu3: mu2 is a simple eigenvalue of L_u
  {
    Spectrum sp({-4.0, -1.0, -1.0});
    SolutionRep rep = build_solution(sp, random_params(rng, 3, -2.0, 2.0));
    auto vals = scalar_spectrum(rep, 4, GridSpec::for_spectrum(sp, 2001));
    int near_mu2 = 0;
    for (double v : vals)
      if (std::abs(v - sp.mu(1)) < 1e-3) ++near_mu2;
    CHECK(near_mu2 == 1);
    CHECK(vals[0] == doctest::Approx(sp.mu(0)).epsilon(1e-4));
  }
}
