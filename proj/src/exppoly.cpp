#include "soliton/exppoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "soliton/errors.hpp"

namespace soliton {

ExpPoly::ExpPoly(std::initializer_list<ExpTerm> ts) : terms_(ts) { canonicalize(); }

ExpPoly ExpPoly::constant(double c) { return single(c, 0.0); }

ExpPoly ExpPoly::single(double coeff, double rate) {
  ExpPoly p;
  if (coeff != 0.0) p.terms_.push_back({coeff, rate});
  return p;
}

ExpPoly ExpPoly::from_terms(std::vector<ExpTerm> ts) {
  ExpPoly p;
  p.terms_ = std::move(ts);
  p.canonicalize();
  return p;
}

void ExpPoly::canonicalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const ExpTerm& a, const ExpTerm& b) { return a.rate < b.rate; });
  std::vector<ExpTerm> out;
  out.reserve(terms_.size());
  for (const ExpTerm& t : terms_) {
    if (!out.empty() && out.back().rate == t.rate) {
      out.back().coeff += t.coeff;
      if (out.back().coeff == 0.0) out.pop_back();
    } else if (t.coeff != 0.0) {
      out.push_back(t);
    }
  }
  terms_ = std::move(out);
}

double ExpPoly::dominant_exponent(double x) const {
  double m = -std::numeric_limits<double>::infinity();
  for (const ExpTerm& t : terms_) m = std::max(m, t.rate * x);
  return m;
}

double ExpPoly::eval_scaled(double x, double shift) const {
  double s = 0.0;
  for (const ExpTerm& t : terms_) s += t.coeff * std::exp(t.rate * x - shift);
  return s;
}

double ExpPoly::eval(double x) const {
  if (terms_.empty()) return 0.0;
  const double s = dominant_exponent(x);
  return eval_scaled(x, s) * std::exp(s);
}

ExpPoly ExpPoly::derivative() const {
  std::vector<ExpTerm> ts;
  ts.reserve(terms_.size());
  for (const ExpTerm& t : terms_) ts.push_back({t.coeff * t.rate, t.rate});
  return from_terms(std::move(ts));
}

ExpPoly ExpPoly::scaled(double s) const {
  std::vector<ExpTerm> ts;
  ts.reserve(terms_.size());
  for (const ExpTerm& t : terms_) ts.push_back({t.coeff * s, t.rate});
  return from_terms(std::move(ts));
}

ExpPoly operator+(const ExpPoly& p, const ExpPoly& q) {
  std::vector<ExpTerm> ts;
  ts.reserve(p.terms_.size() + q.terms_.size());
  ts.insert(ts.end(), p.terms_.begin(), p.terms_.end());
  ts.insert(ts.end(), q.terms_.begin(), q.terms_.end());
  return ExpPoly::from_terms(std::move(ts));
}

ExpPoly operator-(const ExpPoly& p, const ExpPoly& q) { return p + q.scaled(-1.0); }

ExpPoly operator*(const ExpPoly& p, const ExpPoly& q) {
  std::vector<ExpTerm> ts;
  ts.reserve(p.terms_.size() * q.terms_.size());
  for (const ExpTerm& a : p.terms_)
    for (const ExpTerm& b : q.terms_) ts.push_back({a.coeff * b.coeff, a.rate + b.rate});
  return ExpPoly::from_terms(std::move(ts));
}

double eval_ratio(const ExpPoly& num, const ExpPoly& den, double x) {
  if (den.is_zero()) throw DenominatorZero("eval_ratio: denominator is identically zero");
  const double s = std::max(num.dominant_exponent(x), den.dominant_exponent(x));
  const double d = den.eval_scaled(x, s);
  if (d == 0.0) throw DenominatorZero("eval_ratio: denominator vanishes at x");
  return num.eval_scaled(x, s) / d;
}

ExpRatio::ExpRatio(ExpPoly num, ExpPoly den)
    : num_(std::move(num)),
      den_(std::move(den)),
      dnum_(num_.derivative()),
      dden_(den_.derivative()),
      d2num_(dnum_.derivative()),
      d2den_(dden_.derivative()) {
  if (den_.is_zero()) throw DenominatorZero("ExpRatio: denominator is identically zero");
}

double ExpRatio::value(double x) const { return eval_ratio(num_, den_, x); }

ExpRatio::Jet ExpRatio::jet(double x) const {
  // Common shift over num and den rate sets (derivatives share the rates).
  const double s = std::max(num_.dominant_exponent(x), den_.dominant_exponent(x));
  const double d0 = den_.eval_scaled(x, s);
  if (d0 == 0.0) throw DenominatorZero("ExpRatio::jet: denominator vanishes at x");
  const double n0 = num_.eval_scaled(x, s);
  const double n1 = dnum_.eval_scaled(x, s);
  const double n2 = d2num_.eval_scaled(x, s);
  const double d1 = dden_.eval_scaled(x, s);
  const double d2 = d2den_.eval_scaled(x, s);
  Jet j;
  j.v = n0 / d0;
  // n = v d  =>  v' = (n' - v d')/d,  v'' = (n'' - 2 v' d' - v d'')/d
  j.d1 = (n1 - j.v * d1) / d0;
  j.d2 = (n2 - 2.0 * j.d1 * d1 - j.v * d2) / d0;
  return j;
}

}  // namespace soliton
