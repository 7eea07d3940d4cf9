#ifndef SOLITON_CLASSIFY_HPP
#define SOLITON_CLASSIFY_HPP

#include <array>
#include <variant>
#include <vector>

#include "soliton/hirota.hpp"

namespace soliton {

// Degenerate closed forms, used as oracles against the general builder.
enum class DegenerateCase { eq12, eq23, eq123 };
SolutionRep degenerate_build(DegenerateCase c, const Spectrum& spectrum,
                             const SolitonParams& params);

// Classification of normalized solutions (every component mass 1), N = 3:
// Unique for mu = (-9/4,-9/4,-9/4); a two-parameter family for
// mu = (-1,-1,-1/4); no normalized solution for any other spectrum.
struct NormalizedUnique {
  SolitonParams params;  // (sqrt3, sqrt3, sqrt3), signs free
};
struct NormalizedFamily {
  SolitonParams generate(double A, double B) const;  // (A, A, B), A,B != 0
};
using NormalizedOutcome = std::variant<std::monostate, NormalizedUnique, NormalizedFamily>;
NormalizedOutcome normalized_solutions(const Spectrum& spectrum);

// f(p) = u_3'(0)^2 / u_1(0)^2 as a function of the initial derivative ratio
// p = u_2'(0)/u_1'(0), for prescribed q = u_2(0)/u_1(0) != 0 and u_3(0) = 0.
// Requires N = 3 with mu_1 < mu_2 < mu_3 strict.
double f_of_p(const Spectrum& spectrum, double q, double p);
double f_of_p_maximizer(const Spectrum& spectrum, double q);  // -(mu3-mu2)/((mu3-mu1) q)
double f_of_p_pole(const Spectrum& spectrum, double q);       // (mu3-mu1) q / (mu3-mu2)
double f_of_p_max_closed_form(const Spectrum& spectrum, double q);

// Initial data forced by the constants of motion at the u_3 zero.
double initial_u1_sq(const Spectrum& spectrum, double q);
double initial_du1_sq(const Spectrum& spectrum, double q, double p);

// The two zeros of f(p), found by sign scan + Brent (no configuration is
// assumed: for some (mu, q) the zeros straddle the pole and f > 0 outside
// the interval instead of inside; positive_inside records which occurred).
struct PBounds {
  double p_low = 0.0;
  double p_high = 0.0;
  double p_max_arg = 0.0;
  double f_max = 0.0;
  bool positive_inside = true;
};
PBounds p_bounds(const Spectrum& spectrum, double q);

// Scaled parameter curve S: X = a1/eta1, Y = a2/eta2, Z = a3/eta3 with
// u_3(0) = 0 and u_2(0)/u_1(0) = q.  Given X^2 the u_3(0) = 0 equation is
// linear in Y^2 (two admissible |X| windows: the inner and outer hyperbola
// families).  On that curve the ratio u_2(0)/u_1(0) is independent of Z —
// the tanh-style identity A13 - A23 = A12 (1 - A13 A23) cancels every Z^2
// term — so the q constraint selects discrete (X, Y) base points and each
// branch of S is a vertical line {(X*, Y*, Z)} parameterized by Z.
double curve_Y_squared(const Spectrum& spectrum, double Xsq);
double curve_q(const Spectrum& spectrum, double X, double Y);

struct CurveBasePoint {
  double X = 0.0, Y = 0.0;
  bool inner = false;  // which hyperbola family of the XY curve carries it
};
// All base points with X > 0 (the antipodal images carry the sign copies).
// Expected: one per family — the outer-family orbit realizes the four
// branches of the classification, the inner-family orbit their reflections.
std::vector<CurveBasePoint> curve_base_points(const Spectrum& spectrum, double q);

struct BranchPoint {
  double X = 0.0, Y = 0.0, Z = 0.0;
  double p = 0.0;  // u_2'(0)/u_1'(0) of the rebuilt solution
};

// The four branches over the principal base point: S1 = {Z > 0}, and the
// images under (X,Y,Z) -> (X,Y,-Z), (-X,-Y,-Z), (-X,-Y,Z).  Branch endpoints
// sit at Z -> 0 and Z -> inf, where p tends to the two zeros of f(p).
struct BranchSet {
  std::array<std::vector<BranchPoint>, 4> branch;
  int base_points_found = 0;
};
BranchSet trace_branch(const Spectrum& spectrum, double q, int n_points);

// Root-finds p(Z) = p along the four branches; the preimages come in the
// four sign patterns (+-(a1,a2), +-a3).  Empty when f(p) <= 0.
std::vector<std::array<double, 3>> count_preimages(const Spectrum& spectrum, double q, double p,
                                                   double tol);

}  // namespace soliton

#endif
