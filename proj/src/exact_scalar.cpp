#include "qdisc/exact_scalar.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace qdisc {

Rational float_to_rational(double x) {
  if (!std::isfinite(x)) {
    throw InvalidFloat("float_to_rational: non-finite input");
  }
  // mpq_set_d is exact for finite doubles.
  Rational q;
  mpq_set_d(q.get_mpq_t(), x);
  return q;
}

std::string to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw std::invalid_argument("parse_rational: cannot parse '" + std::string(text) + "'");
  };
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
  s = s.substr(start);
  if (s.empty()) return fail();

  if (auto slash = s.find('/'); slash != std::string::npos) {
    mpz_class num, den;
    if (num.set_str(s.substr(0, slash), 10) != 0 || den.set_str(s.substr(slash + 1), 10) != 0) {
      return fail();
    }
    if (den == 0) return fail();
    Rational q(num, den);
    q.canonicalize();
    return q;
  }

  std::size_t i = 0;
  bool negative = false;
  if (s[i] == '+' || s[i] == '-') {
    negative = s[i] == '-';
    ++i;
  }
  std::string digits;
  long frac_digits = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      any_digit = true;
      if (seen_point) ++frac_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) return fail();
  long exponent = 0;
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') return fail();
    std::size_t used = 0;
    try {
      exponent = std::stol(s.substr(i + 1), &used);
    } catch (const std::exception&) {
      return fail();
    }
    if (i + 1 + used != s.size()) return fail();
  }
  mpz_class num(digits, 10);
  if (negative) num = -num;
  long shift = exponent - frac_digits;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(shift)));
  Rational q = shift >= 0 ? Rational(num * scale) : Rational(num, scale);
  q.canonicalize();
  return q;
}

Rational ceil_to_grid(const Rational& q, const mpz_class& grid) {
  mpz_class scaled = q.get_num() * grid;
  mpz_class up;
  mpz_cdiv_q(up.get_mpz_t(), scaled.get_mpz_t(), q.get_den().get_mpz_t());
  Rational out(up, grid);
  out.canonicalize();
  return out;
}

int sign(const Rational& q) { return sgn(q); }

SquarefreeSplit squarefree_split(const Rational& q) {
  if (q <= 0) throw std::domain_error("squarefree_split: non-positive argument");
  // sqrt(p/r) = sqrt(p*r) / r
  mpz_class n = q.get_num() * q.get_den();
  if (mpz_sizeinbase(n.get_mpz_t(), 2) > 62) {
    throw std::domain_error("squarefree_split: radicand too large for trial division");
  }
  mpz_class square_part = 1;
  for (mpz_class f = 2; f * f <= n; ++f) {
    mpz_class f2 = f * f;
    while (mpz_divisible_p(n.get_mpz_t(), f2.get_mpz_t())) {
      n /= f2;
      square_part *= f;
    }
  }
  SquarefreeSplit out;
  out.scale = Rational(square_part, q.get_den());
  out.scale.canonicalize();
  out.radicand = n.get_si();
  return out;
}

// ---------------------------------------------------------------------------
// QuadExt

QuadExt::QuadExt(const Rational& a, const Rational& b, const Rational& d) : a_(a) {
  if (b == 0) return;
  SquarefreeSplit split = squarefree_split(d);
  if (split.radicand == 1) {
    a_ += b * split.scale;
    return;
  }
  b_ = b * split.scale;
  d_ = split.radicand;
}

QuadExt QuadExt::sqrt_of(const Rational& q) {
  if (q < 0) throw std::domain_error("QuadExt::sqrt_of: negative argument");
  if (q == 0) return QuadExt();
  return QuadExt(Rational(0), Rational(1), q);
}

std::int64_t QuadExt::merged_radicand(const QuadExt& o) const {
  if (b_ == 0) return o.b_ == 0 ? 0 : o.d_;
  if (o.b_ == 0 || o.d_ == d_) return d_;
  throw MixedRadicand("QuadExt: sqrt(" + std::to_string(d_) + ") and sqrt(" +
                      std::to_string(o.d_) + ") in one computation");
}

int QuadExt::sign() const {
  int sa = sgn(a_);
  int sb = sgn(b_);
  if (sb == 0) return sa;
  if (sa == 0) return sb;
  if (sa == sb) return sa;
  Rational a2 = a_ * a_;
  Rational b2d = b_ * b_ * d_;
  int cmp_ab = cmp(a2, b2d);
  if (cmp_ab > 0) return sa;
  if (cmp_ab < 0) return sb;
  return 0;
}

QuadExt QuadExt::conjugate() const {
  QuadExt out = *this;
  out.b_ = -out.b_;
  return out;
}

Rational QuadExt::norm() const {
  if (b_ == 0) return a_ * a_;
  return a_ * a_ - b_ * b_ * d_;
}

QuadExt QuadExt::inverse() const {
  if (is_zero()) throw std::domain_error("QuadExt: division by zero");
  if (b_ == 0) {
    QuadExt out;
    out.a_ = 1 / a_;
    return out;
  }
  Rational n = norm();
  QuadExt out;
  out.a_ = a_ / n;
  out.b_ = -b_ / n;
  out.d_ = d_;
  return out;
}

double QuadExt::to_double() const {
  if (b_ == 0) return a_.get_d();
  return a_.get_d() + b_.get_d() * std::sqrt(static_cast<double>(d_));
}

QuadExt QuadExt::operator-() const {
  QuadExt out = *this;
  out.a_ = -out.a_;
  out.b_ = -out.b_;
  return out;
}

QuadExt& QuadExt::operator+=(const QuadExt& o) {
  std::int64_t d = merged_radicand(o);
  a_ += o.a_;
  if (o.b_ != 0) b_ += o.b_;
  d_ = d;
  normalise();
  return *this;
}

QuadExt& QuadExt::operator-=(const QuadExt& o) {
  std::int64_t d = merged_radicand(o);
  a_ -= o.a_;
  if (o.b_ != 0) b_ -= o.b_;
  d_ = d;
  normalise();
  return *this;
}

QuadExt& QuadExt::operator*=(const QuadExt& o) {
  std::int64_t d = merged_radicand(o);
  if (b_ == 0 && o.b_ == 0) {
    a_ *= o.a_;
    return *this;
  }
  Rational na = a_ * o.a_ + b_ * o.b_ * d;
  Rational nb = a_ * o.b_ + b_ * o.a_;
  a_ = std::move(na);
  b_ = std::move(nb);
  d_ = d;
  normalise();
  return *this;
}

QuadExt& QuadExt::operator/=(const QuadExt& o) {
  if (o.b_ == 0) {
    if (o.a_ == 0) throw std::domain_error("QuadExt: division by zero");
    a_ /= o.a_;
    if (b_ != 0) b_ /= o.a_;
    return *this;
  }
  return *this *= o.inverse();
}

bool operator==(const QuadExt& l, const QuadExt& r) {
  if (l.a_ != r.a_ || l.b_ != r.b_) return false;
  return l.b_ == 0 || l.d_ == r.d_;
}

std::string to_string(const QuadExt& x) {
  if (x.is_rational()) return to_string(x.a());
  return to_string(x.a()) + " + " + to_string(x.b()) + "*sqrt(" + std::to_string(x.radicand()) + ")";
}

// ---------------------------------------------------------------------------
// RadicalSum

RadicalSum::RadicalSum(const Rational& q) { add_term(1, q); }

RadicalSum::RadicalSum(const QuadExt& x) {
  add_term(1, x.a());
  if (!x.is_rational()) add_term(x.radicand(), x.b());
}

void RadicalSum::add_term(std::int64_t radicand, const Rational& coef) {
  if (coef == 0) return;
  auto it = terms_.find(radicand);
  if (it == terms_.end()) {
    terms_.emplace(radicand, coef);
    return;
  }
  it->second += coef;
  if (it->second == 0) terms_.erase(it);
}

bool RadicalSum::is_rational() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == 1);
}

Rational RadicalSum::rational_part() const {
  auto it = terms_.find(1);
  return it == terms_.end() ? Rational(0) : it->second;
}

std::pair<Rational, Rational> RadicalSum::enclosure(unsigned bits) const {
  Rational lo = 0;
  Rational hi = 0;
  mpz_class scale = 1;
  scale <<= bits;
  for (const auto& [radicand, coef] : terms_) {
    if (radicand == 1) {
      lo += coef;
      hi += coef;
      continue;
    }
    mpz_class n = mpz_class(static_cast<long>(radicand)) * scale * scale;
    mpz_class root;
    mpz_sqrt(root.get_mpz_t(), n.get_mpz_t());
    Rational r_lo(root, scale);
    Rational r_hi(root + 1, scale);
    r_lo.canonicalize();
    r_hi.canonicalize();
    if (coef > 0) {
      lo += coef * r_lo;
      hi += coef * r_hi;
    } else {
      lo += coef * r_hi;
      hi += coef * r_lo;
    }
  }
  return {lo, hi};
}

int RadicalSum::sign() const {
  if (terms_.empty()) return 0;
  if (is_rational()) return sgn(terms_.begin()->second);
  for (unsigned bits = 64;; bits *= 2) {
    auto [lo, hi] = enclosure(bits);
    if (lo > 0) return 1;
    if (hi < 0) return -1;
  }
}

double RadicalSum::to_double() const {
  double out = 0;
  for (const auto& [radicand, coef] : terms_) {
    out += coef.get_d() * std::sqrt(static_cast<double>(radicand));
  }
  return out;
}

RadicalSum RadicalSum::operator-() const {
  RadicalSum out = *this;
  for (auto& [radicand, coef] : out.terms_) coef = -coef;
  return out;
}

RadicalSum& RadicalSum::operator+=(const RadicalSum& o) {
  for (const auto& [radicand, coef] : o.terms_) add_term(radicand, coef);
  return *this;
}

RadicalSum& RadicalSum::operator-=(const RadicalSum& o) {
  for (const auto& [radicand, coef] : o.terms_) add_term(radicand, -coef);
  return *this;
}

RadicalSum& RadicalSum::operator*=(const Rational& s) {
  if (s == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [radicand, coef] : terms_) coef *= s;
  return *this;
}

std::string to_string(const RadicalSum& x) {
  if (x.terms().empty()) return "0/1";
  std::ostringstream os;
  bool first = true;
  for (const auto& [radicand, coef] : x.terms()) {
    if (!first) os << " + ";
    first = false;
    os << to_string(coef);
    if (radicand != 1) os << "*sqrt(" << radicand << ")";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// ExactComplex

ExactComplex& ExactComplex::operator+=(const ExactComplex& o) {
  re += o.re;
  if (!o.im.is_zero()) im += o.im;
  return *this;
}

ExactComplex& ExactComplex::operator-=(const ExactComplex& o) {
  re -= o.re;
  if (!o.im.is_zero()) im -= o.im;
  return *this;
}

ExactComplex& ExactComplex::operator*=(const ExactComplex& o) {
  if (im.is_zero() && o.im.is_zero()) {
    re *= o.re;
    return *this;
  }
  QuadExt nr = re * o.re - im * o.im;
  QuadExt ni = re * o.im + im * o.re;
  re = std::move(nr);
  im = std::move(ni);
  return *this;
}

ExactComplex& ExactComplex::operator/=(const ExactComplex& o) {
  if (o.im.is_zero()) {
    re /= o.re;
    if (!im.is_zero()) im /= o.re;
    return *this;
  }
  QuadExt den = o.re * o.re + o.im * o.im;
  *this *= conj(o);
  re /= den;
  im /= den;
  return *this;
}

}  // namespace qdisc
