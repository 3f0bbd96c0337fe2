#pragma once

// Labeled tensor-product spaces and the operations on operators living on
// them: Kronecker product, partial trace, trace-and-replace, link product and
// subsystem permutation. Every operation is generic over the scalar and is
// instantiated for cplx (float flavour) and ExactComplex (exact flavour).

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "qdisc/dense_matrix.hpp"

namespace qdisc {

struct Subsystem {
  std::string label;
  std::size_t dim = 1;

  friend bool operator==(const Subsystem&, const Subsystem&) = default;
};

class SpaceStructure {
 public:
  SpaceStructure() = default;
  SpaceStructure(std::initializer_list<Subsystem> systems);
  explicit SpaceStructure(std::vector<Subsystem> systems);

  const std::vector<Subsystem>& systems() const { return systems_; }
  std::size_t size() const { return systems_.size(); }
  std::size_t total_dim() const;

  bool contains(const std::string& label) const;
  std::size_t position(const std::string& label) const;  // throws on unknown label
  std::size_t dim(const std::string& label) const;
  std::vector<std::string> labels() const;

  // Product of the dims of the listed labels.
  std::size_t dim_of(const std::vector<std::string>& labels) const;

  friend bool operator==(const SpaceStructure&, const SpaceStructure&) = default;

 private:
  void validate() const;
  std::vector<Subsystem> systems_;
};

template <class T>
struct LabeledMatrix {
  SpaceStructure space;
  DenseMatrix<T> entries;

  LabeledMatrix() = default;
  LabeledMatrix(SpaceStructure s, DenseMatrix<T> m);

  static LabeledMatrix identity(const SpaceStructure& s) {
    return LabeledMatrix(s, DenseMatrix<T>::identity(s.total_dim()));
  }

  std::size_t dim() const { return entries.rows(); }
  T trace() const { return entries.trace(); }
};

using FloatLabeled = LabeledMatrix<cplx>;
using ExactLabeled = LabeledMatrix<ExactComplex>;

// Tensor product; label sets must be disjoint.
template <class T>
LabeledMatrix<T> kron(const LabeledMatrix<T>& a, const LabeledMatrix<T>& b);

template <class T>
DenseMatrix<T> kron(const DenseMatrix<T>& a, const DenseMatrix<T>& b);

// Contracts the named subsystems. Tracing every label gives a 1x1 matrix on
// the empty space.
template <class T>
LabeledMatrix<T> partial_trace(const LabeledMatrix<T>& a, const std::vector<std::string>& labels);

// Tr_X(A) (x) 1_X / d_X, re-embedded at the original positions.
template <class T>
LabeledMatrix<T> trace_and_replace(const LabeledMatrix<T>& a, const std::vector<std::string>& labels);

// A * B = Tr_S[(A^{T_S} (x) 1)(1 (x) B)] over the shared labels S. Output
// space: A's unshared labels followed by B's unshared labels.
template <class T>
LabeledMatrix<T> link_product(const LabeledMatrix<T>& a, const LabeledMatrix<T>& b);

template <class T>
LabeledMatrix<T> permute_systems(const LabeledMatrix<T>& a, const std::vector<std::string>& new_order);

// Rename labels (same order, same dims).
template <class T>
LabeledMatrix<T> relabel(const LabeledMatrix<T>& a, const std::vector<std::string>& new_labels);

// Choi operator sum_ij |i><j| (x) sum_k K_k|i><j|K_k^dagger on (I, O). The
// Kraus set must be trace preserving: exactly in the exact flavour, to 1e-10
// in the float flavour. Throws std::invalid_argument otherwise.
template <class T>
LabeledMatrix<T> choi_from_kraus(const std::vector<DenseMatrix<T>>& kraus, std::size_t d_in, std::size_t d_out,
                                 const std::string& in_label = "I", const std::string& out_label = "O");

}  // namespace qdisc
