#pragma once

// Shared generators and brute-force references for the tests. Nothing here
// calls into the library code it is used to check.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <complex>
#include <random>
#include <vector>

#include "qdisc/channels.hpp"
#include "qdisc/exact_matrix.hpp"
#include "qdisc/tensor.hpp"

namespace testing_support {

using qdisc::cplx;
using qdisc::ExactComplex;
using qdisc::ExactLabeled;
using qdisc::ExactMatrix;
using qdisc::FloatLabeled;
using qdisc::FloatMatrix;
using qdisc::Rational;

// mpq_class(n, d) does not reduce; everything downstream expects reduced values.
inline Rational frac(const mpz_class& n, const mpz_class& d) {
  Rational q(n, d);
  q.canonicalize();
  return q;
}

inline Rational small_rational(std::mt19937_64& rng, int range = 9, int den = 7) {
  std::uniform_int_distribution<int> num(-range, range), d(1, den);
  return frac(num(rng), d(rng));
}

inline ExactMatrix random_exact_hermitian(std::size_t n, std::mt19937_64& rng) {
  ExactMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = ExactComplex(small_rational(rng));
    for (std::size_t j = i + 1; j < n; ++j) {
      m(i, j) = ExactComplex(small_rational(rng), small_rational(rng));
      m(j, i) = qdisc::conj(m(i, j));
    }
  }
  return m;
}

inline Eigen::MatrixXcd random_hermitian(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
  return (a + a.adjoint()) * 0.5;
}

inline Eigen::MatrixXcd random_state(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
  Eigen::MatrixXcd rho = a * a.adjoint();
  return rho / rho.trace().real();
}

inline FloatMatrix to_dense(const Eigen::MatrixXcd& m) {
  FloatMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = m(i, j);
  return out;
}

inline Eigen::MatrixXcd to_eig(const FloatMatrix& m) {
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
  return out;
}

inline double max_abs_diff(const FloatMatrix& a, const FloatMatrix& b) {
  double out = 0;
  for (std::size_t k = 0; k < a.data().size(); ++k) out = std::max(out, std::abs(a.data()[k] - b.data()[k]));
  return out;
}

// Multi-index of a flat row index, most significant subsystem first.
inline std::vector<std::size_t> digits(std::size_t flat, const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> out(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    out[k] = flat % dims[k];
    flat /= dims[k];
  }
  return out;
}

inline std::size_t flatten(const std::vector<std::size_t>& idx, const std::vector<std::size_t>& dims) {
  std::size_t out = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) out = out * dims[k] + idx[k];
  return out;
}

// Partial trace over the subsystems flagged in `traced`, by explicit index sums.
inline Eigen::MatrixXcd brute_partial_trace(const Eigen::MatrixXcd& a, const std::vector<std::size_t>& dims,
                                            const std::vector<bool>& traced) {
  std::vector<std::size_t> kept_dims;
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (!traced[k]) kept_dims.push_back(dims[k]);
  std::size_t kept = 1;
  for (auto d : kept_dims) kept *= d;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(kept), static_cast<Eigen::Index>(kept));
  const std::size_t n = static_cast<std::size_t>(a.rows());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const auto ri = digits(r, dims), ci = digits(c, dims);
      bool diagonal = true;
      std::vector<std::size_t> rk, ck;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        if (traced[k]) {
          diagonal = diagonal && ri[k] == ci[k];
        } else {
          rk.push_back(ri[k]);
          ck.push_back(ci[k]);
        }
      }
      if (!diagonal) continue;
      out(static_cast<Eigen::Index>(flatten(rk, kept_dims)), static_cast<Eigen::Index>(flatten(ck, kept_dims))) +=
          a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  return out;
}

// Trace norm via eigenvalues of a Hermitian matrix.
inline double trace_norm(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  return es.eigenvalues().cwiseAbs().sum();
}

}  // namespace testing_support
