#include "qdisc/exact_matrix.hpp"

#include <algorithm>
#include <cmath>

namespace qdisc {

bool is_hermitian(const ExactMatrix& m) {
  if (!m.is_square()) return false;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j)
      if (m(i, j) != conj(m(j, i))) return false;
  return true;
}

bool is_hermitian(const FloatMatrix& m, double tol) {
  if (!m.is_square()) return false;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j)
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) return false;
  return true;
}

bool is_psd_exact(const ExactMatrix& m) {
  if (!is_hermitian(m)) throw std::invalid_argument("is_psd_exact: matrix is not Hermitian");
  const std::size_t n = m.rows();
  ExactMatrix a = m;
  for (std::size_t k = 0; k < n; ++k) {
    const QuadExt pivot = a(k, k).re;
    const int s = pivot.sign();
    if (s < 0) return false;
    if (s == 0) {
      for (std::size_t j = k + 1; j < n; ++j)
        if (!a(k, j).is_zero()) return false;
      continue;
    }
    const QuadExt inv_pivot = pivot.inverse();
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a(k, i).is_zero()) continue;
      ExactComplex f = conj(a(k, i));
      f.re *= inv_pivot;
      if (!f.im.is_zero()) f.im *= inv_pivot;
      for (std::size_t j = i; j < n; ++j) {
        if (a(k, j).is_zero()) continue;
        a(i, j) -= f * a(k, j);
      }
    }
  }
  return true;
}

bool all_psd_exact(std::span<const ExactMatrix> ms, Execution exec) {
  for (const auto& m : ms)
    if (!is_hermitian(m)) throw std::invalid_argument("all_psd_exact: matrix is not Hermitian");

  if (exec == Execution::Serial) {
    return std::all_of(ms.begin(), ms.end(), [](const ExactMatrix& m) { return is_psd_exact(m); });
  }
  const long count = static_cast<long>(ms.size());
  int ok = 1;
#pragma omp parallel for schedule(dynamic) reduction(&& : ok)
  for (long k = 0; k < count; ++k) {
    ok = ok && is_psd_exact(ms[static_cast<std::size_t>(k)]);
  }
  return ok != 0;
}

ExactMatrix mix(const Rational& eta, const ExactMatrix& a, const ExactMatrix& b) {
  if (eta == 1) return a;
  if (eta == 0) return b;
  const ExactComplex e(eta);
  const ExactComplex f(Rational(1 - eta));
  ExactMatrix out = a;
  out *= e;
  out += b * f;
  return out;
}

ExactMatrix depolarize(const Rational& eta, const ExactMatrix& a) {
  return mix(eta, a, ExactMatrix::identity(a.rows()));
}

namespace {

bool probe(const Rational& eta, std::span<const ExactMatrix> candidates, std::span<const ExactMatrix> targets,
           Execution exec) {
  std::vector<ExactMatrix> mixed;
  mixed.reserve(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k) mixed.push_back(mix(eta, candidates[k], targets[k]));
  return all_psd_exact(mixed, exec);
}

}  // namespace

Rational common_eta(std::span<const ExactMatrix> candidates, std::span<const ExactMatrix> targets, int steps,
                    Execution exec) {
  if (candidates.size() != targets.size()) throw std::invalid_argument("common_eta: size mismatch");
  if (probe(Rational(1), candidates, targets, exec)) return Rational(1);
  if (!probe(Rational(0), candidates, targets, exec)) {
    throw std::logic_error("common_eta: mixing target is not PSD, no feasible eta");
  }
  Rational lo = 0;
  Rational hi = 1;
  for (int step = 0; step < steps; ++step) {
    Rational mid = (lo + hi) / 2;
    if (probe(mid, candidates, targets, exec)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

Rational binary_search_eta(const ExactMatrix& candidate, const ExactMatrix& mix_target, int steps) {
  return common_eta(std::span<const ExactMatrix>(&candidate, 1), std::span<const ExactMatrix>(&mix_target, 1), steps,
                    Execution::Serial);
}

ExactMatrix to_exact(const FloatMatrix& m) {
  ExactMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      out(i, j) = ExactComplex(QuadExt(float_to_rational(m(i, j).real())),
                               QuadExt(float_to_rational(m(i, j).imag())));
  return out;
}

FloatMatrix to_float(const ExactMatrix& m) {
  FloatMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = cplx(m(i, j).re.to_double(), m(i, j).im.to_double());
  return out;
}

Eigen::MatrixXcd to_eigen(const FloatMatrix& m) {
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
  return out;
}

FloatMatrix from_eigen(const Eigen::MatrixXcd& m) {
  FloatMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = m(i, j);
  return out;
}

std::int64_t common_radicand(const ExactMatrix& m) {
  std::int64_t d = 0;
  auto merge = [&](const QuadExt& x) {
    std::int64_t r = x.radicand();
    if (r == 0) return;
    if (d == 0) {
      d = r;
    } else if (d != r) {
      throw MixedRadicand("matrix mixes sqrt(" + std::to_string(d) + ") and sqrt(" + std::to_string(r) + ")");
    }
  };
  for (const auto& z : m.data()) {
    merge(z.re);
    merge(z.im);
  }
  return d;
}

QuadExt real_trace_of_product(const ExactMatrix& a, const ExactMatrix& b) {
  return trace_of_product(a, b).re;
}

double min_eigenvalue(const FloatMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace qdisc
