#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "qdisc/dense_matrix.hpp"
#include "qdisc/exact_scalar.hpp"

namespace qdisc {

// Kernels with independent per-matrix work come in two flavours: an OpenMP
// version and the serial reference it is tested against.
enum class Execution { Serial, Parallel };

template <class T>
DenseMatrix<T> hermitize(const DenseMatrix<T>& m) {
  if (!m.is_square()) throw std::invalid_argument("hermitize: matrix is not square");
  DenseMatrix<T> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = (m(i, j) + conj_scalar(m(j, i))) / T(2);
  return out;
}

bool is_hermitian(const ExactMatrix& m);
bool is_hermitian(const FloatMatrix& m, double tol);

// Exact PSD test by LDL^dagger elimination with exact pivot signs. A negative
// pivot rejects; a zero pivot requires the rest of its row to vanish.
// Precondition: m Hermitian (checked, throws std::invalid_argument).
bool is_psd_exact(const ExactMatrix& m);

// All matrices PSD. Parallel flavour splits the matrices across threads.
bool all_psd_exact(std::span<const ExactMatrix> ms, Execution exec = Execution::Parallel);

// eta * a + (1 - eta) * b
ExactMatrix mix(const Rational& eta, const ExactMatrix& a, const ExactMatrix& b);

// eta * a + (1 - eta) * identity
ExactMatrix depolarize(const Rational& eta, const ExactMatrix& a);

// Largest eta in [0, 1] found by dyadic bisection (at most `steps` probes) such
// that eta * candidate + (1 - eta) * mix_target is PSD. Returns 1 when the
// candidate is already PSD. Throws std::logic_error when even eta = 0 fails.
Rational binary_search_eta(const ExactMatrix& candidate, const ExactMatrix& mix_target, int steps = 60);

// One eta shared by several (candidate, target) pairs.
Rational common_eta(std::span<const ExactMatrix> candidates, std::span<const ExactMatrix> targets,
                    int steps = 60, Execution exec = Execution::Parallel);

// Entrywise exact conversion of a float matrix.
ExactMatrix to_exact(const FloatMatrix& m);
FloatMatrix to_float(const ExactMatrix& m);

Eigen::MatrixXcd to_eigen(const FloatMatrix& m);
FloatMatrix from_eigen(const Eigen::MatrixXcd& m);

// The one radicand shared by all entries (0 when all entries are rational).
// Throws MixedRadicand otherwise.
std::int64_t common_radicand(const ExactMatrix& m);

// Re Tr(A B) for Hermitian A, B.
QuadExt real_trace_of_product(const ExactMatrix& a, const ExactMatrix& b);

double min_eigenvalue(const FloatMatrix& m);

}  // namespace qdisc
