#pragma once

// Small dense row-major matrix, generic over the scalar so the same tensor
// code runs on std::complex<double> and on ExactComplex.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qdisc/exact_scalar.hpp"

namespace qdisc {

using cplx = std::complex<double>;

inline cplx conj_scalar(const cplx& z) { return std::conj(z); }
inline ExactComplex conj_scalar(const ExactComplex& z) { return conj(z); }

template <class T>
class DenseMatrix {
 public:
  using Scalar = T;

  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) out(i, i) = T(1);
    return out;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  DenseMatrix& operator+=(const DenseMatrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  DenseMatrix& operator-=(const DenseMatrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  DenseMatrix& operator*=(const T& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }
  DenseMatrix& operator/=(const T& s) {
    for (auto& x : data_) x /= s;
    return *this;
  }

  friend DenseMatrix operator+(DenseMatrix l, const DenseMatrix& r) { return l += r; }
  friend DenseMatrix operator-(DenseMatrix l, const DenseMatrix& r) { return l -= r; }
  friend DenseMatrix operator*(DenseMatrix l, const T& s) { return l *= s; }
  friend DenseMatrix operator*(const T& s, DenseMatrix r) { return r *= s; }
  friend DenseMatrix operator/(DenseMatrix l, const T& s) { return l /= s; }

  friend DenseMatrix operator*(const DenseMatrix& l, const DenseMatrix& r) {
    if (l.cols_ != r.rows_) throw std::invalid_argument("DenseMatrix: product shape mismatch");
    DenseMatrix out(l.rows_, r.cols_);
    for (std::size_t i = 0; i < l.rows_; ++i) {
      for (std::size_t k = 0; k < l.cols_; ++k) {
        const T& lik = l(i, k);
        if (lik == T(0)) continue;
        for (std::size_t j = 0; j < r.cols_; ++j) out(i, j) += lik * r(k, j);
      }
    }
    return out;
  }

  friend bool operator==(const DenseMatrix& l, const DenseMatrix& r) {
    return l.rows_ == r.rows_ && l.cols_ == r.cols_ && l.data_ == r.data_;
  }
  friend bool operator!=(const DenseMatrix& l, const DenseMatrix& r) { return !(l == r); }

  DenseMatrix adjoint() const {
    DenseMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = conj_scalar((*this)(i, j));
    return out;
  }

  DenseMatrix transpose() const {
    DenseMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
  }

  T trace() const {
    if (!is_square()) throw std::invalid_argument("DenseMatrix: trace of non-square matrix");
    T out(0);
    for (std::size_t i = 0; i < rows_; ++i) out += (*this)(i, i);
    return out;
  }

 private:
  void check_same_shape(const DenseMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("DenseMatrix: shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using FloatMatrix = DenseMatrix<cplx>;
using ExactMatrix = DenseMatrix<ExactComplex>;

// Tr(A B) without forming the product.
template <class T>
T trace_of_product(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols()) {
    throw std::invalid_argument("trace_of_product: shape mismatch");
  }
  T out(0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == T(0)) continue;
      out += a(i, k) * b(k, i);
    }
  return out;
}

}  // namespace qdisc
