#include "soliton/classify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "soliton/errors.hpp"
#include "soliton/numeric.hpp"

namespace soliton {

namespace {

void require_n3(const Spectrum& sp, const char* who) {
  if (sp.size() != 3) throw std::invalid_argument(std::string(who) + ": requires N = 3");
}

void require_strict3(const Spectrum& sp, const char* who) {
  require_n3(sp, who);
  if (!(sp.mu(0) < sp.mu(1) && sp.mu(1) < sp.mu(2)))
    throw std::invalid_argument(std::string(who) + ": requires mu1 < mu2 < mu3 strictly");
}

void require_nonzero_q(double q, const char* who) {
  if (q == 0.0)
    throw ZeroInitialRatio(std::string(who) +
                           ": q = 0 is the vanishing-component dichotomy, handled by the "
                           "degenerate constructors, not by the (q,p) parameterization");
}

}  // namespace

SolutionRep degenerate_build(DegenerateCase c, const Spectrum& sp, const SolitonParams& pr) {
  require_n3(sp, "degenerate_build");
  if (pr.a.size() != 3) throw SizeMismatch("degenerate_build: params length must be 3");
  const double m1 = sp.mu(0), m2 = sp.mu(1), m3 = sp.mu(2);
  const double e1 = sp.eta(0), e3 = sp.eta(2);
  const double a1 = pr.a[0], a2 = pr.a[1], a3 = pr.a[2];

  std::vector<ExpPoly> g;
  ExpPoly f;
  switch (c) {
    case DegenerateCase::eq12: {
      if (!(m1 == m2 && m2 < m3)) throw CaseMismatch("degenerate_build: needs mu1 = mu2 < mu3");
      const double s12 = a1 * a1 + a2 * a2;
      f = ExpPoly::from_terms(
          {{1.0, 0.0},
           {a3 * a3 / (4 * e3 * e3), 2 * e3},
           {s12 / (4 * e1 * e1), 2 * e1},
           {s12 * a3 * a3 * (e3 - e1) * (e3 - e1) / (16 * e1 * e1 * e3 * e3 * (e1 + e3) * (e1 + e3)),
            2 * (e1 + e3)}});
      const double c13 = a3 * a3 * (e1 - e3) / (4 * e3 * e3 * (e1 + e3));
      g.push_back(ExpPoly::from_terms({{a1, e1}, {a1 * c13, e1 + 2 * e3}}));
      g.push_back(ExpPoly::from_terms({{a2, e1}, {a2 * c13, e1 + 2 * e3}}));
      const double c31 = s12 * (e3 - e1) / (4 * e1 * e1 * (e1 + e3));
      g.push_back(ExpPoly::from_terms({{a3, e3}, {a3 * c31, e3 + 2 * e1}}));
      break;
    }
    case DegenerateCase::eq23: {
      if (!(m1 < m2 && m2 == m3)) throw CaseMismatch("degenerate_build: needs mu1 < mu2 = mu3");
      const double s23 = a2 * a2 + a3 * a3;
      f = ExpPoly::from_terms(
          {{1.0, 0.0},
           {a1 * a1 / (4 * e1 * e1), 2 * e1},
           {s23 / (4 * e3 * e3), 2 * e3},
           {a1 * a1 * s23 * (e1 - e3) * (e1 - e3) / (16 * e1 * e1 * e3 * e3 * (e1 + e3) * (e1 + e3)),
            2 * (e1 + e3)}});
      const double c13 = s23 * (e1 - e3) / (4 * e3 * e3 * (e1 + e3));
      g.push_back(ExpPoly::from_terms({{a1, e1}, {a1 * c13, e1 + 2 * e3}}));
      const double c21 = a1 * a1 * (e3 - e1) / (4 * e1 * e1 * (e1 + e3));
      g.push_back(ExpPoly::from_terms({{a2, e3}, {a2 * c21, e3 + 2 * e1}}));
      g.push_back(ExpPoly::from_terms({{a3, e3}, {a3 * c21, e3 + 2 * e1}}));
      break;
    }
    case DegenerateCase::eq123: {
      if (!(m1 == m2 && m2 == m3)) throw CaseMismatch("degenerate_build: needs mu1 = mu2 = mu3");
      const double s = a1 * a1 + a2 * a2 + a3 * a3;
      f = ExpPoly::from_terms({{1.0, 0.0}, {s / (4 * e1 * e1), 2 * e1}});
      g.push_back(ExpPoly::single(a1, e1));
      g.push_back(ExpPoly::single(a2, e1));
      g.push_back(ExpPoly::single(a3, e1));
      break;
    }
  }
  return SolutionRep::from_parts(sp, pr, std::move(g), std::move(f));
}

NormalizedOutcome normalized_solutions(const Spectrum& sp) {
  require_n3(sp, "normalized_solutions");
  if (sp.mu(0) == -2.25 && sp.mu(1) == -2.25 && sp.mu(2) == -2.25) {
    const double r = std::sqrt(3.0);
    return NormalizedUnique{SolitonParams{{r, r, r}}};
  }
  if (sp.mu(0) == -1.0 && sp.mu(1) == -1.0 && sp.mu(2) == -0.25) return NormalizedFamily{};
  return std::monostate{};
}

SolitonParams NormalizedFamily::generate(double A, double B) const {
  if (A == 0.0 || B == 0.0)
    throw std::invalid_argument("NormalizedFamily: A and B must be nonzero");
  return SolitonParams{{A, A, B}};
}

double f_of_p(const Spectrum& sp, double q, double p) {
  require_strict3(sp, "f_of_p");
  require_nonzero_q(q, "f_of_p");
  const double m1 = sp.mu(0), m2 = sp.mu(1), m3 = sp.mu(2);
  const double d1 = m3 - m1, d2 = m3 - m2;
  const double W = d2 + q * q * d1;
  const double c1 = -((1 + q * q) * (1 + q * q) * d1 * d2 / W + m1 + q * q * m2);
  const double c2num = q * q * (m1 - m2) * (m1 - m2) *
                       (m1 * m1 * q * q - m1 * m3 * q * q + m2 * m2 - m2 * m3);
  const double pole = d2 * p - d1 * q;
  if (pole == 0.0) throw PoleAtP("f_of_p: (mu3-mu2) p = (mu3-mu1) q");
  return c1 - (1 + p * p) * c2num / (W * pole * pole);
}

double f_of_p_maximizer(const Spectrum& sp, double q) {
  require_strict3(sp, "f_of_p_maximizer");
  require_nonzero_q(q, "f_of_p_maximizer");
  return -(sp.mu(2) - sp.mu(1)) / ((sp.mu(2) - sp.mu(0)) * q);
}

double f_of_p_pole(const Spectrum& sp, double q) {
  require_strict3(sp, "f_of_p_pole");
  require_nonzero_q(q, "f_of_p_pole");
  return (sp.mu(2) - sp.mu(0)) * q / (sp.mu(2) - sp.mu(1));
}

double f_of_p_max_closed_form(const Spectrum& sp, double q) {
  require_strict3(sp, "f_of_p_max_closed_form");
  require_nonzero_q(q, "f_of_p_max_closed_form");
  const double m1 = sp.mu(0), m2 = sp.mu(1), m3 = sp.mu(2);
  const double num = q * q * (m1 - m3) + (m2 - m3);
  return -m3 * num * num / ((m3 - m1) * (m3 - m1) * q * q + (m3 - m2) * (m3 - m2));
}

double initial_u1_sq(const Spectrum& sp, double q) {
  require_strict3(sp, "initial_u1_sq");
  require_nonzero_q(q, "initial_u1_sq");
  const double d1 = sp.mu(2) - sp.mu(0), d2 = sp.mu(2) - sp.mu(1);
  return d1 * d2 / (d2 + q * q * d1);
}

double initial_du1_sq(const Spectrum& sp, double q, double p) {
  require_strict3(sp, "initial_du1_sq");
  require_nonzero_q(q, "initial_du1_sq");
  const double m1 = sp.mu(0), m2 = sp.mu(1), m3 = sp.mu(2);
  const double d1 = m3 - m1, d2 = m3 - m2;
  const double W = d2 + q * q * d1;
  const double pole = d2 * p - d1 * q;
  if (pole == 0.0) throw PoleAtP("initial_du1_sq: derivative-ratio pole");
  return q * q * (m1 - m2) * (m1 - m2) * d1 * d2 *
         (m1 * m1 * q * q - m1 * m3 * q * q + m2 * m2 - m2 * m3) / (W * W * pole * pole);
}

namespace {

// Collects sign changes of fn over the sample sequence and refines each with
// Brent.  Samples where fn is not finite are skipped.
void scan_roots(const std::function<double(double)>& fn, const std::vector<double>& xs,
                std::vector<double>& roots) {
  double xprev = 0.0, fprev = 0.0;
  bool have_prev = false;
  for (double x : xs) {
    const double fx = fn(x);
    if (!std::isfinite(fx)) {
      have_prev = false;
      continue;
    }
    if (fx == 0.0) {
      roots.push_back(x);
      have_prev = false;
      continue;
    }
    if (have_prev && (fprev > 0.0) != (fx > 0.0))
      roots.push_back(find_root(fn, xprev, x, 1e-13 * (1.0 + std::abs(x))));
    xprev = x;
    fprev = fx;
    have_prev = true;
  }
}

}  // namespace

PBounds p_bounds(const Spectrum& sp, double q) {
  require_strict3(sp, "p_bounds");
  require_nonzero_q(q, "p_bounds");
  const double pstar = f_of_p_maximizer(sp, q);
  const double ppole = f_of_p_pole(sp, q);
  auto fn = [&sp, q, ppole](double p) {
    if (p == ppole) return -std::numeric_limits<double>::infinity();
    return f_of_p(sp, q, p);
  };

  // Sample each interval cut by {p*, pole}, clustering geometrically at the
  // cuts and sweeping geometrically toward +-infinity; f has at most two
  // real zeros, so sign changes over this net locate both.
  std::vector<double> cuts{pstar, ppole};
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> xs;
  auto push_range = [&xs](double a, double b) {
    for (int i = 1; i < 128; ++i) xs.push_back(a + (b - a) * i / 128.0);
    for (int j = 2; j < 44; ++j) {
      xs.push_back(a + (b - a) * std::ldexp(1.0, -j));
      xs.push_back(b - (b - a) * std::ldexp(1.0, -j));
    }
  };
  const double h0 = 1.0 + std::abs(cuts[0]) + std::abs(cuts[1]);
  for (int j = -20; j < 40; ++j) {
    xs.push_back(cuts[0] - h0 * std::ldexp(1.0, j));
    xs.push_back(cuts[1] + h0 * std::ldexp(1.0, j));
  }
  push_range(cuts[0], cuts[1]);
  std::sort(xs.begin(), xs.end());

  std::vector<double> roots;
  scan_roots(fn, xs, roots);
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-9 * (1 + std::abs(a)); }),
              roots.end());
  if (roots.size() != 2)
    throw RootBracketFailure("p_bounds: expected exactly two zeros of f(p), found " +
                             std::to_string(roots.size()));

  PBounds out;
  out.p_low = roots[0];
  out.p_high = roots[1];
  out.p_max_arg = pstar;
  out.f_max = f_of_p(sp, q, pstar);
  double probe = 0.5 * (out.p_low + out.p_high);
  if (ppole > out.p_low && ppole < out.p_high) probe = 0.5 * (out.p_low + ppole);
  out.positive_inside = fn(probe) > 0.0;
  return out;
}

double curve_Y_squared(const Spectrum& sp, double Xsq) {
  require_strict3(sp, "curve_Y_squared");
  const double A12 = (sp.eta(0) - sp.eta(1)) / (sp.eta(0) + sp.eta(1));
  const double A13 = (sp.eta(0) - sp.eta(2)) / (sp.eta(0) + sp.eta(2));
  const double A23 = (sp.eta(1) - sp.eta(2)) / (sp.eta(1) + sp.eta(2));
  return 4.0 * (A13 * Xsq - 4.0) / (A23 * (A12 * A12 * A13 * Xsq - 4.0));
}

double curve_q(const Spectrum& sp, double X, double Y) {
  require_strict3(sp, "curve_q");
  const double A12 = (sp.eta(0) - sp.eta(1)) / (sp.eta(0) + sp.eta(1));
  return sp.eta(1) * Y * (1.0 - 0.25 * A12 * X * X) /
         (sp.eta(0) * X * (1.0 + 0.25 * A12 * Y * Y));
}

std::vector<CurveBasePoint> curve_base_points(const Spectrum& sp, double q) {
  require_strict3(sp, "curve_base_points");
  require_nonzero_q(q, "curve_base_points");
  const double A12 = (sp.eta(0) - sp.eta(1)) / (sp.eta(0) + sp.eta(1));
  const double A13 = (sp.eta(0) - sp.eta(2)) / (sp.eta(0) + sp.eta(2));
  const double x_edge = 2.0 / std::sqrt(A13);          // inner family: 0 < X < x_edge
  const double x_asym = 2.0 / (A12 * std::sqrt(A13));  // outer family: X > x_asym

  std::vector<CurveBasePoint> points;
  for (int fam = 0; fam < 2; ++fam) {
    const bool inner = fam == 1;
    std::vector<double> xs;
    if (inner) {
      for (int i = 1; i < 4000; ++i) xs.push_back(x_edge * i / 4000.0);
      for (int j = 2; j < 48; ++j) {
        xs.push_back(x_edge * std::ldexp(1.0, -j));
        xs.push_back(x_edge * (1.0 - std::ldexp(1.0, -j)));
      }
      std::sort(xs.begin(), xs.end());
    } else {
      for (int i = 0; i <= 4000; ++i)
        xs.push_back(x_asym * (1.0 + std::pow(10.0, -9.0 + 17.0 * i / 4000.0)));
    }
    for (double sy : {1.0, -1.0}) {
      auto h = [&](double X) {
        const double ysq = curve_Y_squared(sp, X * X);
        if (!(ysq > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        return curve_q(sp, X, sy * std::sqrt(ysq)) - q;
      };
      std::vector<double> roots;
      scan_roots(h, xs, roots);
      for (double X : roots)
        points.push_back({X, sy * std::sqrt(curve_Y_squared(sp, X * X)), inner});
    }
  }
  return points;  // outer family first, then inner
}

namespace {

double branch_p(const Spectrum& sp, double X, double Y, double Z) {
  SolitonParams pr{{sp.eta(0) * X, sp.eta(1) * Y, sp.eta(2) * Z}};
  const SolutionRep rep = build_solution(sp, pr);
  const ExpRatio::Jet j1 = rep.component_jet(0, 0.0);
  const ExpRatio::Jet j2 = rep.component_jet(1, 0.0);
  return j2.d1 / j1.d1;
}

std::vector<double> z_samples(int n, double decades) {
  // log-spaced sweep; the branch endpoints Z -> 0 and Z -> inf are approached
  // as the sweep widens but never hit
  std::vector<double> zs(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    zs[static_cast<std::size_t>(j)] = std::pow(10.0, -decades + 2.0 * decades * j / (n - 1));
  return zs;
}

}  // namespace

BranchSet trace_branch(const Spectrum& sp, double q, int n_points) {
  require_strict3(sp, "trace_branch");
  require_nonzero_q(q, "trace_branch");
  if (n_points < 2) throw std::invalid_argument("trace_branch: n_points must be >= 2");
  const std::vector<CurveBasePoint> points = curve_base_points(sp, q);
  if (points.empty())
    throw EmptyBranch("trace_branch: no (X, Y) base point on the parameter curve (check q)");

  const CurveBasePoint& bp = points.front();
  BranchSet out;
  out.base_points_found = static_cast<int>(points.size());
  const double sgn[4][2] = {{1, 1}, {1, -1}, {-1, -1}, {-1, 1}};  // (xy, z) signs of S1..S4
  for (double Z : z_samples(n_points, 7.0)) {
    for (int b = 0; b < 4; ++b) {
      BranchPoint pt;
      pt.X = sgn[b][0] * bp.X;
      pt.Y = sgn[b][0] * bp.Y;
      pt.Z = sgn[b][1] * Z;
      pt.p = branch_p(sp, pt.X, pt.Y, pt.Z);
      out.branch[static_cast<std::size_t>(b)].push_back(pt);
    }
  }
  for (auto& br : out.branch)
    std::sort(br.begin(), br.end(),
              [](const BranchPoint& a, const BranchPoint& b) { return a.Z < b.Z; });
  return out;
}

std::vector<std::array<double, 3>> count_preimages(const Spectrum& sp, double q, double p,
                                                   double tol) {
  require_strict3(sp, "count_preimages");
  require_nonzero_q(q, "count_preimages");
  if (!(f_of_p(sp, q, p) > 0.0)) return {};  // u_3'(0)^2 < 0: no admissible data

  const std::vector<CurveBasePoint> points = curve_base_points(sp, q);
  std::vector<std::array<double, 3>> out;
  if (points.empty()) return out;
  // the four classification branches live over the principal base point; the
  // second (inner-family) point carries their reflections
  const CurveBasePoint& bp = points.front();
  auto gap = [&](double Z) { return branch_p(sp, bp.X, bp.Y, Z) - p; };
  std::vector<double> roots;
  scan_roots(gap, z_samples(3001, 8.0), roots);
  for (double Z : roots) {
    if (!(std::abs(gap(Z)) <= std::max(tol, 1e-7 * (1.0 + std::abs(p))))) continue;
    const double a1 = sp.eta(0) * bp.X, a2 = sp.eta(1) * bp.Y, a3 = sp.eta(2) * Z;
    out.push_back({a1, a2, a3});
    out.push_back({a1, a2, -a3});
    out.push_back({-a1, -a2, -a3});
    out.push_back({-a1, -a2, a3});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](const std::array<double, 3>& u, const std::array<double, 3>& v) {
                          double d = 0.0, s = 1.0;
                          for (int i = 0; i < 3; ++i) {
                            d = std::max(d, std::abs(u[static_cast<std::size_t>(i)] -
                                                     v[static_cast<std::size_t>(i)]));
                            s = std::max(s, std::abs(u[static_cast<std::size_t>(i)]));
                          }
                          return d < 1e-7 * s;
                        }),
            out.end());
  return out;
}

}  // namespace soliton
