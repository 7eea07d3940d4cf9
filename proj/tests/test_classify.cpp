#include <cmath>
#include <random>
#include <variant>

#include "common.hpp"
#include "doctest.h"
#include "soliton/classify.hpp"
#include "soliton/errors.hpp"
#include "soliton/invariants.hpp"
#include "soliton/numeric.hpp"

using namespace soliton;
using namespace soliton_tests;

namespace {

double golden_max(const std::function<double(double)>& fn, double a, double b) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  for (int it = 0; it < 200; ++it) {
    if (fn(c) > fn(d)) b = d; else a = c;
    c = b - gr * (b - a);
    d = a + gr * (b - a);
  }
  return 0.5 * (a + b);
}

// residual of the raw curve equations at a traced point
double curve_constraint_residual(const Spectrum& sp, double X, double Y) {
  const double A12 = (sp.eta(0) - sp.eta(1)) / (sp.eta(0) + sp.eta(1));
  const double A13 = (sp.eta(0) - sp.eta(2)) / (sp.eta(0) + sp.eta(2));
  const double A23 = (sp.eta(1) - sp.eta(2)) / (sp.eta(1) + sp.eta(2));
  return 1.0 - 0.25 * (A13 * X * X + A23 * Y * Y) +
         (1.0 / 16.0) * A12 * A12 * A13 * A23 * X * X * Y * Y;
}

double ratio_constraint_residual(const Spectrum& sp, double q, double X, double Y, double Z) {
  const double A12 = (sp.eta(0) - sp.eta(1)) / (sp.eta(0) + sp.eta(1));
  const double A13 = (sp.eta(0) - sp.eta(2)) / (sp.eta(0) + sp.eta(2));
  const double A23 = (sp.eta(1) - sp.eta(2)) / (sp.eta(1) + sp.eta(2));
  const double num =
      sp.eta(1) * Y *
      (1.0 + 0.25 * (-A12 * X * X + A23 * Z * Z) - (1.0 / 16.0) * A13 * A13 * A12 * A23 * X * X * Z * Z);
  const double den =
      sp.eta(0) * X *
      (1.0 + 0.25 * (A12 * Y * Y + A13 * Z * Z) + (1.0 / 16.0) * A23 * A23 * A12 * A13 * Y * Y * Z * Z);
  return num - q * den;  // cross-multiplied form of u2(0)/u1(0) = q
}

}  // namespace

TEST_CASE("degenerate closed forms agree with the general builder pointwise") {
  std::mt19937_64 rng(201);
  // mu1 = mu2 < mu3
  {
    Spectrum sp({-4.0, -4.0, -1.0});
    SolitonParams pr = random_params(rng, 3, -2.5, 2.5);
    SolutionRep a = degenerate_build(DegenerateCase::eq12, sp, pr);
    SolutionRep b = build_solution(sp, pr);
    CHECK(sup_component_diff(a, b, -15.0, 15.0, 301) < 1e-12);
    CHECK(residual_sup(a, GridSpec::for_spectrum(sp, 301)) < 1e-10);
  }
  // mu1 < mu2 = mu3, plus the grouped mass law
  {
    Spectrum sp({-4.0, -1.0, -1.0});
    SolitonParams pr = random_params(rng, 3, -2.5, 2.5);
    SolutionRep a = degenerate_build(DegenerateCase::eq23, sp, pr);
    SolutionRep b = build_solution(sp, pr);
    CHECK(sup_component_diff(a, b, -15.0, 15.0, 301) < 1e-12);
    CHECK(mass(a, 0) == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(mass(a, 1) + mass(a, 2) == doctest::Approx(2.0).epsilon(1e-10));
  }
  // all equal: the normalized-unique spectrum
  {
    const double r = std::sqrt(3.0);
    Spectrum sp({-2.25, -2.25, -2.25});
    SolitonParams pr{{r, r, r}};
    SolutionRep a = degenerate_build(DegenerateCase::eq123, sp, pr);
    SolutionRep b = build_solution(sp, pr);
    CHECK(sup_component_diff(a, b, -15.0, 15.0, 301) < 1e-12);
    CHECK(a.eval_component(0, 0.0) == doctest::Approx(r / 2).epsilon(1e-15));
  }
  // family case through the eq12 constructor
  {
    Spectrum sp({-1.0, -1.0, -0.25});
    SolitonParams pr{{0.8, 0.8, 1.7}};
    SolutionRep a = degenerate_build(DegenerateCase::eq12, sp, pr);
    SolutionRep b = build_solution(sp, pr);
    CHECK(sup_component_diff(a, b, -15.0, 15.0, 301) < 1e-12);
  }
  // pattern mismatches
  Spectrum strict({-4.0, -2.0, -1.0});
  SolitonParams pr{{1.0, 1.0, 1.0}};
  CHECK_THROWS_AS(degenerate_build(DegenerateCase::eq12, strict, pr), CaseMismatch);
  CHECK_THROWS_AS(degenerate_build(DegenerateCase::eq23, strict, pr), CaseMismatch);
  CHECK_THROWS_AS(degenerate_build(DegenerateCase::eq123, strict, pr), CaseMismatch);
  Spectrum deg12({-4.0, -4.0, -1.0});
  CHECK_THROWS_AS(degenerate_build(DegenerateCase::eq23, deg12, pr), CaseMismatch);
}

TEST_CASE("normalized classification: unique, family, none") {
  // unique spectrum
  {
    NormalizedOutcome out = normalized_solutions(Spectrum({-2.25, -2.25, -2.25}));
    auto* uq = std::get_if<NormalizedUnique>(&out);
    REQUIRE(uq != nullptr);
    SolutionRep rep = build_solution(Spectrum({-2.25, -2.25, -2.25}), uq->params);
    CHECK(rep.eval_component(0, 0.0) == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-14));
    for (int i = 0; i < 3; ++i) CHECK(mass(rep, i) == doctest::Approx(1.0).epsilon(1e-10));
  }
  // family spectrum
  {
    NormalizedOutcome out = normalized_solutions(Spectrum({-1.0, -1.0, -0.25}));
    auto* fam = std::get_if<NormalizedFamily>(&out);
    REQUIRE(fam != nullptr);
    SolutionRep rep = build_solution(Spectrum({-1.0, -1.0, -0.25}), fam->generate(1.0, 1.0));
    for (int i = 0; i < 3; ++i) CHECK(mass(rep, i) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK_THROWS(fam->generate(0.0, 1.0));
  }
  // no orthonormal triple exists: on both normalized spectra the first two
  // components are proportional, so their L2 pairing stays away from zero
  {
    Spectrum uq({-2.25, -2.25, -2.25});
    SolutionRep rep = build_solution(
        uq, std::get<NormalizedUnique>(normalized_solutions(uq)).params);
    const double ip = integrate(
        [&](double x) { return rep.eval_component(0, x) * rep.eval_component(1, x); }, -40.0,
        40.0, 1e-9);
    CHECK(std::abs(ip) > 0.9);  // equals the common mass 1
    Spectrum fm({-1.0, -1.0, -0.25});
    SolutionRep repf = build_solution(
        fm, std::get<NormalizedFamily>(normalized_solutions(fm)).generate(1.4, -0.8));
    const double ipf = integrate(
        [&](double x) { return repf.eval_component(0, x) * repf.eval_component(1, x); }, -60.0,
        60.0, 1e-9);
    CHECK(std::abs(ipf) > 0.9);
  }

  // everything else returns none (the masses are pinned to 2 eta_i)
  CHECK(std::holds_alternative<std::monostate>(normalized_solutions(Spectrum({-4.0, -2.0, -1.0}))));
  std::mt19937_64 rng(202);
  int nontrivial = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> mu;
    for (int i = 0; i < 3; ++i) mu.push_back(uniform(rng, -5.0, -0.1));
    std::sort(mu.begin(), mu.end());
    if (!std::holds_alternative<std::monostate>(normalized_solutions(Spectrum(mu)))) ++nontrivial;
  }
  CHECK(nontrivial == 0);
}

TEST_CASE("f(p): zeros, closed-form maximum, pole") {
  std::mt19937_64 rng(203);
  Spectrum sp({-4.0, -2.0, -1.0});
  const double q = 1.0;

  PBounds pb = p_bounds(sp, q);
  CHECK(pb.p_low < pb.p_high);
  CHECK(std::abs(f_of_p(sp, q, pb.p_low)) < 1e-10);
  CHECK(std::abs(f_of_p(sp, q, pb.p_high)) < 1e-10);
  CHECK(pb.f_max > 0.0);
  CHECK(pb.f_max == doctest::Approx(f_of_p_max_closed_form(sp, q)).epsilon(1e-12));
  CHECK(pb.positive_inside);
  CHECK(f_of_p(sp, q, 0.5 * (pb.p_low + pb.p_high)) > 0.0);

  // numeric maximization as an independent oracle for the closed form
  for (int trial = 0; trial < 25; ++trial) {
    Spectrum rsp = random_strict_spectrum(rng, 3);
    double rq = uniform(rng, 0.5, 2.0) * (trial % 2 ? -1.0 : 1.0);
    const double pstar = f_of_p_maximizer(rsp, rq);
    auto fn = [&](double p) { return f_of_p(rsp, rq, p); };
    const double span = 0.5 * (1.0 + std::abs(pstar));
    const double pnum = golden_max(fn, pstar - span, pstar + span);
    CHECK(fn(pnum) == doctest::Approx(f_of_p_max_closed_form(rsp, rq)).epsilon(1e-8));
    CHECK(pnum == doctest::Approx(pstar).epsilon(1e-6));
  }

  // pole rejection and q = 0 rejection
  CHECK_THROWS_AS(f_of_p(sp, 1.0, f_of_p_pole(sp, 1.0)), PoleAtP);
  CHECK_THROWS_AS(f_of_p(sp, 0.0, 0.3), ZeroInitialRatio);
  CHECK_THROWS_AS(p_bounds(sp, 0.0), ZeroInitialRatio);
  Spectrum deg({-4.0, -4.0, -1.0});
  CHECK_THROWS(p_bounds(deg, 1.0));
}

TEST_CASE("f(p) equals the derivative-ratio square of real solutions") {
  // at the zero of u_3:  f(p) = u_3'(0)^2 / u_1(0)^2  and the forced initial
  // data match the closed-form expressions, whichever positivity configuration
  // the (mu, q) lands in
  std::mt19937_64 rng(204);
  for (int trial = 0; trial < 12; ++trial) {
    Spectrum sp = random_strict_spectrum(rng, 3);
    SolutionRep rep = build_solution(sp, random_params(rng, 3, -3.0, 3.0));
    // locate a zero of u_3
    double x0 = 0.0;
    bool found = false;
    double prev = rep.eval_component(2, -30.0 / sp.eta_min());
    for (double x = -30.0 / sp.eta_min(); x <= 30.0 / sp.eta_min() && !found; x += 0.01) {
      const double v = rep.eval_component(2, x);
      if (prev != 0.0 && (prev > 0) != (v > 0)) {
        x0 = find_root([&](double t) { return rep.eval_component(2, t); }, x - 0.01, x, 1e-14);
        found = true;
      }
      prev = v;
    }
    REQUIRE(found);
    const auto j1 = rep.component_jet(0, x0), j2 = rep.component_jet(1, x0),
               j3 = rep.component_jet(2, x0);
    const double q = j2.v / j1.v, p = j2.d1 / j1.d1;
    const double truth = j3.d1 * j3.d1 / (j1.v * j1.v);
    CHECK(f_of_p(sp, q, p) == doctest::Approx(truth).epsilon(1e-8));
    CHECK(initial_u1_sq(sp, q) == doctest::Approx(j1.v * j1.v).epsilon(1e-8));
    CHECK(initial_du1_sq(sp, q, p) == doctest::Approx(j1.d1 * j1.d1).epsilon(1e-8));
  }
}

TEST_CASE("four branches: Z-lines over the curve base points") {
  Spectrum sp({-4.0, -2.0, -1.0});
  for (double q : {1.0, -0.7, 2.3}) {
    PBounds pb = p_bounds(sp, q);
    BranchSet bs = trace_branch(sp, q, 61);
    CHECK(bs.base_points_found == 2);  // the principal orbit and its reflections
    for (const auto& br : bs.branch) REQUIRE(br.size() == 61);

    // every traced point satisfies the curve equations and the rebuilt
    // solution reproduces the prescribed initial ratios
    for (std::size_t s = 0; s < 61; s += 15) {
      const BranchPoint& pt = bs.branch[0][s];
      CHECK(std::abs(curve_constraint_residual(sp, pt.X, pt.Y)) < 1e-10);
      CHECK(std::abs(ratio_constraint_residual(sp, q, pt.X, pt.Y, pt.Z)) < 1e-10 * (1 + std::abs(pt.Z * pt.Z)));
      SolutionRep rep = build_solution(
          sp, SolitonParams{{sp.eta(0) * pt.X, sp.eta(1) * pt.Y, sp.eta(2) * pt.Z}});
      const auto j1 = rep.component_jet(0, 0.0), j2 = rep.component_jet(1, 0.0);
      CHECK(std::abs(rep.eval_component(2, 0.0)) < 1e-8);
      CHECK(j2.v / j1.v == doctest::Approx(q).epsilon(1e-8));
      CHECK(j2.d1 / j1.d1 == doctest::Approx(pt.p).epsilon(1e-10));
      // u_3'(0)^2/u_1(0)^2 realizes f(p) on the branch
      const auto j3 = rep.component_jet(2, 0.0);
      CHECK(f_of_p(sp, q, pt.p) == doctest::Approx(j3.d1 * j3.d1 / (j1.v * j1.v)).epsilon(1e-8));
    }

    // p is invariant under the antipodal symmetry (X,Y,Z) -> (-X,-Y,Z)
    for (std::size_t s = 0; s < 61; ++s)
      CHECK(bs.branch[3][s].p == doctest::Approx(bs.branch[0][s].p).epsilon(1e-12));

    // the p-range of every branch fills (p_low, p_high)
    for (const auto& br : bs.branch) {
      double pmin = 1e300, pmax = -1e300;
      for (const BranchPoint& pt : br) {
        pmin = std::min(pmin, pt.p);
        pmax = std::max(pmax, pt.p);
      }
      CHECK(pmin == doctest::Approx(pb.p_low).epsilon(1e-6));
      CHECK(pmax == doctest::Approx(pb.p_high).epsilon(1e-6));
    }

    // refinement pushes the sampled range closer to the exact endpoints
    BranchSet coarse = trace_branch(sp, q, 11);
    double cmin = 1e300, cmax = -1e300;
    for (const BranchPoint& pt : coarse.branch[0]) {
      cmin = std::min(cmin, pt.p);
      cmax = std::max(cmax, pt.p);
    }
    double fmin = 1e300, fmax = -1e300;
    for (const BranchPoint& pt : bs.branch[0]) {
      fmin = std::min(fmin, pt.p);
      fmax = std::max(fmax, pt.p);
    }
    CHECK(fmin - pb.p_low <= cmin - pb.p_low + 1e-12);
    CHECK(pb.p_high - fmax <= pb.p_high - cmax + 1e-12);
  }
  CHECK_THROWS_AS(trace_branch(sp, 0.0, 11), ZeroInitialRatio);
}

TEST_CASE("preimage counting: four inside, zero outside, paired sign pattern") {
  std::mt19937_64 rng(205);
  for (int trial = 0; trial < 4; ++trial) {
    Spectrum sp = random_strict_spectrum(rng, 3);
    const double q = uniform(rng, 0.6, 1.8) * (trial % 2 ? -1.0 : 1.0);
    PBounds pb = p_bounds(sp, q);
    if (!pb.positive_inside) continue;  // acceptance draws stay in the interval configuration
    for (double t : {0.25, 0.5, 0.8}) {
      const double p = pb.p_low + t * (pb.p_high - pb.p_low);
      auto pre = count_preimages(sp, q, p, 1e-9);
      REQUIRE(pre.size() == 4);
      // sign pattern: +-(a1,a2) x +-a3, all four distinct combinations
      for (const auto& a : pre) {
        SolutionRep rep = build_solution(sp, SolitonParams{{a[0], a[1], a[2]}});
        const auto j1 = rep.component_jet(0, 0.0), j2 = rep.component_jet(1, 0.0);
        CHECK(std::abs(rep.eval_component(2, 0.0)) < 1e-8);
        CHECK(j2.v / j1.v == doctest::Approx(q).epsilon(1e-7));
        CHECK(j2.d1 / j1.d1 == doctest::Approx(p).epsilon(1e-7));
      }
      int flips12 = 0, flips3 = 0;
      for (const auto& a : pre) {
        if (a[0] * pre[0][0] < 0) ++flips12;
        if (a[2] * pre[0][2] < 0) ++flips3;
        CHECK(a[0] * pre[0][0] * a[1] * pre[0][1] > 0);  // a1, a2 flip together
      }
      CHECK(flips12 == 2);
      CHECK(flips3 == 2);
    }
    // strictly outside the admissible interval: no solutions
    CHECK(count_preimages(sp, q, pb.p_high + 1.0, 1e-9).empty());
    CHECK(count_preimages(sp, q, pb.p_low - 1.0, 1e-9).empty());
  }
}
