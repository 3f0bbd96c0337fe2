#pragma once

// Exact arithmetic over Q and over a real quadratic field Q(sqrt(d)).
//
// Rational is GMP's mpq_class (always canonical: gcd(num, den) = 1, den > 0).
// QuadExt holds a + b*sqrt(d) with d a squarefree integer > 1; the radicand is
// shared by every value taking part in one computation, and mixing two
// distinct radicands throws MixedRadicand. RadicalSum is the scalar-only
// escape hatch used when bounds add terms from different quadratic fields.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace qdisc {

using Rational = mpq_class;

class InvalidFloat : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class MixedRadicand : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Exact value of an IEEE-754 double: mantissa * 2^exponent, no rounding.
Rational float_to_rational(double x);

// "num/den" (den always printed).
std::string to_string(const Rational& q);

// Accepts "num/den", integers and plain decimals ("0.67", "-1.5e-3").
Rational parse_rational(std::string_view text);

// Smallest multiple of 1/grid that is >= q.
Rational ceil_to_grid(const Rational& q, const mpz_class& grid);

int sign(const Rational& q);

// Splits a positive rational q into s^2 * r with s rational and r a squarefree
// integer, so that sqrt(q) = s * sqrt(r).
struct SquarefreeSplit {
  Rational scale;
  std::int64_t radicand = 1;
};
SquarefreeSplit squarefree_split(const Rational& q);

class QuadExt {
 public:
  QuadExt() = default;
  QuadExt(const Rational& a) : a_(a) {}  // NOLINT: implicit by design of the field embedding
  QuadExt(long a) : a_(a) {}             // NOLINT
  QuadExt(int a) : a_(a) {}              // NOLINT

  // a + b*sqrt(d). d may be any positive rational; it is normalised to a
  // squarefree integer (b absorbs the square part).
  QuadExt(const Rational& a, const Rational& b, const Rational& d);

  // Exact square root of a non-negative rational.
  static QuadExt sqrt_of(const Rational& q);

  const Rational& a() const { return a_; }
  const Rational& b() const { return b_; }
  // 0 when the value is rational.
  std::int64_t radicand() const { return b_ == 0 ? 0 : d_; }

  bool is_rational() const { return b_ == 0; }
  bool is_zero() const { return a_ == 0 && b_ == 0; }

  // Exact sign of a + b*sqrt(d).
  int sign() const;

  QuadExt conjugate() const;  // a - b*sqrt(d)
  Rational norm() const;      // a^2 - b^2 d
  QuadExt inverse() const;

  double to_double() const;

  QuadExt operator-() const;
  QuadExt& operator+=(const QuadExt& o);
  QuadExt& operator-=(const QuadExt& o);
  QuadExt& operator*=(const QuadExt& o);
  QuadExt& operator/=(const QuadExt& o);

  friend QuadExt operator+(QuadExt l, const QuadExt& r) { return l += r; }
  friend QuadExt operator-(QuadExt l, const QuadExt& r) { return l -= r; }
  friend QuadExt operator*(QuadExt l, const QuadExt& r) { return l *= r; }
  friend QuadExt operator/(QuadExt l, const QuadExt& r) { return l /= r; }

  friend bool operator==(const QuadExt& l, const QuadExt& r);
  friend bool operator!=(const QuadExt& l, const QuadExt& r) { return !(l == r); }
  friend bool operator<(const QuadExt& l, const QuadExt& r) { return (l - r).sign() < 0; }
  friend bool operator>(const QuadExt& l, const QuadExt& r) { return (l - r).sign() > 0; }
  friend bool operator<=(const QuadExt& l, const QuadExt& r) { return (l - r).sign() <= 0; }
  friend bool operator>=(const QuadExt& l, const QuadExt& r) { return (l - r).sign() >= 0; }

 private:
  std::int64_t merged_radicand(const QuadExt& o) const;
  void normalise() {
    if (b_ == 0) d_ = 0;
  }

  Rational a_ = 0;
  Rational b_ = 0;
  std::int64_t d_ = 0;
};

inline int sign(const QuadExt& x) { return x.sign(); }
std::string to_string(const QuadExt& x);

// Sum of rational multiples of square roots of distinct squarefree integers.
// Elements of a multiquadratic field; enough to add bounds whose terms live in
// different quadratic fields and compare the result exactly.
class RadicalSum {
 public:
  RadicalSum() = default;
  RadicalSum(const Rational& q);  // NOLINT
  RadicalSum(const QuadExt& x);   // NOLINT

  // radicand (1 = rational part) -> coefficient, zero coefficients dropped.
  const std::map<std::int64_t, Rational>& terms() const { return terms_; }
  void add_term(std::int64_t radicand, const Rational& coef);

  bool is_rational() const;
  Rational rational_part() const;

  // Exact sign, decided by refining rational enclosures of each sqrt until the
  // enclosure of the sum excludes zero. Terminates because distinct squarefree
  // square roots are linearly independent over Q.
  int sign() const;

  // Rational enclosure [lo, hi] with hi - lo <= 2^-bits * (sum of |coef|).
  std::pair<Rational, Rational> enclosure(unsigned bits) const;
  double to_double() const;

  RadicalSum operator-() const;
  RadicalSum& operator+=(const RadicalSum& o);
  RadicalSum& operator-=(const RadicalSum& o);
  RadicalSum& operator*=(const Rational& s);

  friend RadicalSum operator+(RadicalSum l, const RadicalSum& r) { return l += r; }
  friend RadicalSum operator-(RadicalSum l, const RadicalSum& r) { return l -= r; }
  friend RadicalSum operator*(RadicalSum l, const Rational& s) { return l *= s; }
  friend bool operator==(const RadicalSum& l, const RadicalSum& r) { return l.terms_ == r.terms_; }
  friend bool operator<(const RadicalSum& l, const RadicalSum& r) { return (l - r).sign() < 0; }
  friend bool operator>(const RadicalSum& l, const RadicalSum& r) { return (l - r).sign() > 0; }

 private:
  std::map<std::int64_t, Rational> terms_;
};

std::string to_string(const RadicalSum& x);

// Complex number over an exact real field.
struct ExactComplex {
  QuadExt re;
  QuadExt im;

  ExactComplex() = default;
  ExactComplex(const QuadExt& r) : re(r) {}  // NOLINT
  ExactComplex(const Rational& r) : re(r) {}  // NOLINT
  ExactComplex(int r) : re(r) {}  // NOLINT
  ExactComplex(const QuadExt& r, const QuadExt& i) : re(r), im(i) {}

  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  bool is_real() const { return im.is_zero(); }

  ExactComplex operator-() const { return {-re, -im}; }
  ExactComplex& operator+=(const ExactComplex& o);
  ExactComplex& operator-=(const ExactComplex& o);
  ExactComplex& operator*=(const ExactComplex& o);
  ExactComplex& operator/=(const ExactComplex& o);

  friend ExactComplex operator+(ExactComplex l, const ExactComplex& r) { return l += r; }
  friend ExactComplex operator-(ExactComplex l, const ExactComplex& r) { return l -= r; }
  friend ExactComplex operator*(ExactComplex l, const ExactComplex& r) { return l *= r; }
  friend ExactComplex operator/(ExactComplex l, const ExactComplex& r) { return l /= r; }
  friend bool operator==(const ExactComplex& l, const ExactComplex& r) {
    return l.re == r.re && l.im == r.im;
  }
  friend bool operator!=(const ExactComplex& l, const ExactComplex& r) { return !(l == r); }
};

inline ExactComplex conj(const ExactComplex& z) { return {z.re, -z.im}; }
inline const QuadExt& real(const ExactComplex& z) { return z.re; }

}  // namespace qdisc
