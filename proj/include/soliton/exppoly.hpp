#ifndef SOLITON_EXPPOLY_HPP
#define SOLITON_EXPPOLY_HPP

#include <initializer_list>
#include <vector>

namespace soliton {

// One term c * e^{lambda x}.
struct ExpTerm {
  double coeff = 0.0;
  double rate = 0.0;
};

// Finite sum of real exponentials, kept in canonical form: rates strictly
// increasing, equal rates merged exactly, zero coefficients dropped.  The
// empty sum is the zero function.  Rates are compared with exact floating
// equality; callers construct mathematically equal rates from the same
// doubles in the same order, so merging is reliable without epsilons.
class ExpPoly {
 public:
  ExpPoly() = default;
  ExpPoly(std::initializer_list<ExpTerm> ts);

  static ExpPoly constant(double c);
  static ExpPoly single(double coeff, double rate);
  static ExpPoly from_terms(std::vector<ExpTerm> ts);

  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const std::vector<ExpTerm>& terms() const { return terms_; }

  // Dominant-exponent evaluation: p(x) = e^s * sum_k c_k e^{lambda_k x - s}
  // with s = max_k lambda_k x, so no intermediate overflows for
  // |lambda_k x| <= 700.  The result itself may be +-inf only if the value is.
  double eval(double x) const;

  // e^{-shift} * p(x); the building block for joint (ratio) evaluation.
  double eval_scaled(double x, double shift) const;

  // max_k lambda_k x over the terms; -inf for the zero polynomial.
  double dominant_exponent(double x) const;

  ExpPoly derivative() const;  // termwise c,lambda -> c*lambda
  ExpPoly scaled(double s) const;

  friend ExpPoly operator+(const ExpPoly& p, const ExpPoly& q);
  friend ExpPoly operator-(const ExpPoly& p, const ExpPoly& q);
  friend ExpPoly operator*(const ExpPoly& p, const ExpPoly& q);
  ExpPoly operator-() const { return scaled(-1.0); }

 private:
  std::vector<ExpTerm> terms_;
  void canonicalize();
};

inline ExpPoly add(const ExpPoly& p, const ExpPoly& q) { return p + q; }
inline ExpPoly mul(const ExpPoly& p, const ExpPoly& q) { return p * q; }

// num(x)/den(x), both shifted by the common dominant exponent.  Throws
// DenominatorZero if the shifted denominator vanishes.
double eval_ratio(const ExpPoly& num, const ExpPoly& den, double x);

// Rational function num/den of two exponential polynomials with cached
// derivative polynomials.  jet() returns value and first two derivatives,
// computed from jointly shifted evaluations of num, den and their
// derivatives; every quotient is degree-one homogeneous in the scaled
// values, so the shift cancels exactly.
class ExpRatio {
 public:
  ExpRatio() = default;
  ExpRatio(ExpPoly num, ExpPoly den);

  struct Jet {
    double v = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
  };

  double value(double x) const;
  Jet jet(double x) const;

  const ExpPoly& num() const { return num_; }
  const ExpPoly& den() const { return den_; }

 private:
  ExpPoly num_, den_, dnum_, dden_, d2num_, d2den_;
};

}  // namespace soliton

#endif
