#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cfloat>
#include <cmath>
#include <random>

#include "qdisc/exact_matrix.hpp"
#include "support.hpp"

using namespace qdisc;
using testing_support::random_exact_hermitian;
using testing_support::frac;
using testing_support::small_rational;

TEST_CASE("float_to_rational is the exact binary value") {
  CHECK(float_to_rational(0.5) == frac(1, 2));
  CHECK(float_to_rational(0.0) == 0);
  CHECK(float_to_rational(-3.0) == -3);
  // 0.1 = 3602879701896397 * 2^-55
  CHECK(to_string(float_to_rational(0.1)) == "3602879701896397/36028797018963968");
  CHECK_THROWS_AS(float_to_rational(std::nan("")), InvalidFloat);
  CHECK_THROWS_AS(float_to_rational(INFINITY), InvalidFloat);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 200; ++k) {
    const double x = u(rng) * std::pow(2.0, static_cast<int>(rng() % 80) - 40);
    int e = 0;
    const double mant = std::frexp(x, &e);
    // mant * 2^53 is an integer for doubles
    const mpz_class m(static_cast<long>(std::ldexp(mant, 53)));
    Rational oracle(m);
    if (e - 53 >= 0) {
      oracle *= Rational(mpz_class(1) << static_cast<unsigned>(e - 53));
    } else {
      oracle /= Rational(mpz_class(1) << static_cast<unsigned>(53 - e));
    }
    CHECK(float_to_rational(x) == oracle);
    CHECK(float_to_rational(x).get_d() == x);
  }
  CHECK(float_to_rational(DBL_MIN / 4).get_d() == DBL_MIN / 4);
}

TEST_CASE("parse_rational and ceil_to_grid") {
  CHECK(parse_rational("0.67") == frac(67, 100));
  CHECK(parse_rational("87/100") == frac(87, 100));
  CHECK(parse_rational("-1.5e-3") == frac(-3, 2000));
  CHECK(parse_rational(" 4 ") == 4);
  CHECK_THROWS(parse_rational("1/0"));
  CHECK_THROWS(parse_rational("abc"));
  CHECK(ceil_to_grid(frac(8166483894, 10000000000), 1000000) == frac(816649, 1000000));
  CHECK(ceil_to_grid(frac(1, 2), 1000000) == frac(1, 2));
  CHECK(ceil_to_grid(frac(-1, 3), 10) == frac(-3, 10));
}

TEST_CASE("squarefree_split") {
  auto s = squarefree_split(frac(33, 100));
  CHECK(s.radicand == 33);
  CHECK(s.scale == frac(1, 10));
  s = squarefree_split(Rational(12));
  CHECK(s.radicand == 3);
  CHECK(s.scale == 2);
  s = squarefree_split(frac(9, 4));
  CHECK(s.radicand == 1);
  CHECK(s.scale == frac(3, 2));
}

TEST_CASE("QuadExt sign") {
  CHECK(QuadExt(1).sign() == 1);
  CHECK(QuadExt(-10, 1, 33).sign() == -1);  // sqrt(33) < 10
  CHECK(QuadExt(-5, 1, 33).sign() == 1);    // sqrt(33) > 5
  CHECK(QuadExt(0).sign() == 0);
  CHECK(QuadExt(6, -1, 33).sign() == 1);
  CHECK(QuadExt(5, -1, 33).sign() == -1);
}

TEST_CASE("QuadExt field identities") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 300; ++k) {
    const Rational a = small_rational(rng, 50, 13), b = small_rational(rng, 50, 13);
    const QuadExt x(a, b, 33);
    const QuadExt prod = x * x.conjugate();
    CHECK(prod.is_rational());
    CHECK(prod.a() == a * a - b * b * 33);
    if (!x.is_zero()) {
      CHECK(x.sign() * (-x).sign() == -1);
      CHECK(x * x.inverse() == QuadExt(1));
      CHECK(std::abs(x.to_double() - (a.get_d() + b.get_d() * std::sqrt(33.0))) < 1e-9 * (1 + std::abs(x.to_double())));
    }
  }
  CHECK_THROWS_AS(QuadExt(1, 1, 2) + QuadExt(1, 1, 3), MixedRadicand);
  CHECK(QuadExt::sqrt_of(frac(33, 100)) == QuadExt(0, frac(1, 10), 33));
  CHECK(QuadExt::sqrt_of(frac(9, 16)) == QuadExt(frac(3, 4)));
}

TEST_CASE("RadicalSum compares across fields") {
  RadicalSum s2(QuadExt(0, 1, 2)), s3(QuadExt(0, 1, 3));
  const RadicalSum sum = s2 + s3;  // 3.1462643699...
  CHECK(sum > RadicalSum(frac(31462, 10000)));
  CHECK(sum < RadicalSum(frac(31463, 10000)));
  CHECK((sum - s2 - s3).sign() == 0);
  CHECK(std::abs(sum.to_double() - (std::sqrt(2.0) + std::sqrt(3.0))) < 1e-15);
  CHECK(RadicalSum(frac(1, 2)).is_rational());
  CHECK(!sum.is_rational());
}

TEST_CASE("is_psd_exact basic cases") {
  CHECK(is_psd_exact(ExactMatrix::identity(2)));
  ExactMatrix d(2, 2);
  d(0, 0) = ExactComplex(Rational(1));
  d(1, 1) = ExactComplex(-Rational(1, mpz_class("10000000000000000000000000000000000000000")));
  CHECK(!is_psd_exact(d));

  const QuadExt r(0, frac(1, 10), 33);
  ExactMatrix rank1(2, 2);
  rank1(0, 0) = ExactComplex(1);
  rank1(0, 1) = ExactComplex(r);
  rank1(1, 0) = ExactComplex(r);
  rank1(1, 1) = ExactComplex(frac(33, 100));
  CHECK(is_psd_exact(rank1));
  rank1(1, 1) = ExactComplex(frac(32, 100));
  CHECK(!is_psd_exact(rank1));

  // zero pivot with a nonzero row
  ExactMatrix z(2, 2);
  z(0, 1) = ExactComplex(1);
  z(1, 0) = ExactComplex(1);
  CHECK(!is_psd_exact(z));
  CHECK(is_psd_exact(ExactMatrix(3, 3)));
}

TEST_CASE("is_psd_exact agrees with a float eigenvalue oracle") {
  std::mt19937_64 rng(17);
  int compared = 0;
  for (int k = 0; k < 300; ++k) {
    ExactMatrix m = random_exact_hermitian(6, rng);
    // shift toward PSD half of the time
    if (k % 2 == 0) m += ExactMatrix::identity(6) * ExactComplex(Rational(static_cast<long>(rng() % 20)));
    const double lo = min_eigenvalue(to_float(m));
    if (std::abs(lo) < 1e-6) continue;
    ++compared;
    CHECK(is_psd_exact(m) == (lo > 0));
  }
  CHECK(compared > 250);
}

TEST_CASE("parallel and serial PSD kernels agree") {
  std::mt19937_64 rng(19);
  std::vector<ExactMatrix> ms;
  for (int k = 0; k < 12; ++k) ms.push_back(random_exact_hermitian(5, rng) + ExactMatrix::identity(5) * ExactComplex(40));
  CHECK(all_psd_exact(ms, Execution::Serial));
  CHECK(all_psd_exact(ms, Execution::Parallel));
  ms[7] = random_exact_hermitian(5, rng) - ExactMatrix::identity(5) * ExactComplex(40);
  CHECK(!all_psd_exact(ms, Execution::Serial));
  CHECK(!all_psd_exact(ms, Execution::Parallel));
}

TEST_CASE("hermitize") {
  ExactMatrix m(2, 2);
  m(0, 1) = ExactComplex(1);
  const ExactMatrix h = hermitize(m);
  CHECK(h(0, 1) == ExactComplex(frac(1, 2)));
  CHECK(h(1, 0) == ExactComplex(frac(1, 2)));
  CHECK(h(0, 0).is_zero());

  std::mt19937_64 rng(23);
  ExactMatrix a(3, 3);
  for (auto& z : a.data()) z = ExactComplex(small_rational(rng), small_rational(rng));
  const ExactMatrix ha = hermitize(a);
  CHECK(is_hermitian(ha));
  CHECK(hermitize(ha) == ha);
  for (std::size_t i = 0; i < 3; ++i) CHECK(ha(i, i).im.is_zero());
  CHECK(ha.trace().re == a.trace().re);
  CHECK_THROWS(hermitize(ExactMatrix(2, 3)));
}

TEST_CASE("binary_search_eta") {
  const ExactMatrix id = ExactMatrix::identity(2);
  CHECK(binary_search_eta(id, id) == 1);

  ExactMatrix c(2, 2);
  c(0, 0) = ExactComplex(-1);
  c(1, 1) = ExactComplex(1);
  const Rational eta = binary_search_eta(c, id);
  CHECK(eta == frac(1, 2));  // dyadic bisection lands on the crossing
  CHECK(is_psd_exact(mix(eta, c, id)));

  const Rational eta2 = binary_search_eta(id * ExactComplex(-1), id);
  CHECK(eta2 <= frac(1, 2));
  CHECK(eta2 > frac(1, 2) - frac(1, 1000));

  // crossing at 3/7, not dyadic: largest probe below it
  ExactMatrix c3(2, 2);
  c3(0, 0) = ExactComplex(frac(-4, 3));
  c3(1, 1) = ExactComplex(1);
  const Rational eta3 = binary_search_eta(c3, id, 40);
  CHECK(eta3 <= frac(3, 7));
  CHECK(eta3 > frac(3, 7) - frac(1, 1000000));
  CHECK(is_psd_exact(mix(eta3, c3, id)));

  ExactMatrix bad = id * ExactComplex(-1);
  CHECK_THROWS_AS(binary_search_eta(bad, bad), std::logic_error);

  const std::vector<ExactMatrix> cands{c, c3};
  const std::vector<ExactMatrix> targets{id, id};
  const Rational common = common_eta(cands, targets, 40, Execution::Serial);
  CHECK(common <= frac(3, 7));
  CHECK(common == common_eta(cands, targets, 40, Execution::Parallel));
}

TEST_CASE("real_trace_of_product and common_radicand") {
  const ExactLabeled ad = amplitude_damping_exact(frac(67, 100));
  CHECK(common_radicand(ad.entries) == 33);
  const QuadExt t = real_trace_of_product(ad.entries, ad.entries);
  // 1 + 2(1-g) + g^2 + (1-g)^2 with g = 67/100
  const Rational g(67, 100);
  CHECK(t == QuadExt(1 + 2 * (1 - g) + g * g + (1 - g) * (1 - g)));
}
