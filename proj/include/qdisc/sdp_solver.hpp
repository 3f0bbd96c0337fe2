#pragma once

// Dense primal-dual interior-point solver for complex Hermitian block SDPs.
//
//   primal:  maximize  sum_b Re Tr(C_b X_b) + offset
//            s.t.      A(X) = b,  X_b >= 0
//   dual:    minimize  b^T y + offset
//            s.t.      Z_b = A_b^T(y) - C_b >= 0
//
// Blocks are handled in real "svec" coordinates: diagonal entries first, then
// sqrt(2) Re H_kl and sqrt(2) Im H_kl for every k < l, so that
// Re Tr(A B) = svec(A) . svec(B) for Hermitian A, B.

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qdisc {

Eigen::VectorXd svec(const Eigen::MatrixXcd& h);
Eigen::MatrixXcd smat(const Eigen::Ref<const Eigen::VectorXd>& v, Eigen::Index n);

// Constraint rows touching one block: coeffs.row(r) is svec(A_{rows[r], b}).
struct SdpBlockRows {
  std::vector<Eigen::Index> rows;
  Eigen::MatrixXd coeffs;
};

struct SdpProblem {
  std::vector<Eigen::Index> block_dims;
  std::vector<std::string> block_names;
  std::vector<Eigen::MatrixXcd> objective;
  std::vector<SdpBlockRows> constraints;
  Eigen::VectorXd rhs;
  double objective_offset = 0.0;

  Eigen::Index num_rows() const { return rhs.size(); }
  std::size_t num_blocks() const { return block_dims.size(); }

  // Returns the new block index.
  std::size_t add_block(Eigen::Index n, std::string name, Eigen::MatrixXcd c);

  // Appends rows with the given right-hand sides; returns the first new row.
  Eigen::Index add_rows(const Eigen::VectorXd& values);

  // Attaches coefficients (one svec row per entry of `rows`) to a block.
  void set_rows(std::size_t block, std::vector<Eigen::Index> rows, Eigen::MatrixXd coeffs);

  // Shape, Hermiticity and index checks; throws std::invalid_argument.
  void validate() const;
};

enum class SdpStatus { Optimal, MaxIter, NumericalFailure };
std::string to_string(SdpStatus s);

struct SdpOptions {
  double tol = 1e-9;
  int max_iter = 120;
  bool verbose = false;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalFailure;
  int iterations = 0;
  std::vector<Eigen::MatrixXcd> x;
  std::vector<Eigen::MatrixXcd> z;
  Eigen::VectorXd y;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;              // |dual - primal|
  double primal_residual = 0.0;  // max |b - A(X)|
  double dual_residual = 0.0;    // max entry of |A^T y - C - Z|
};

class SdpBackend {
 public:
  virtual ~SdpBackend() = default;
  virtual SdpSolution solve(const SdpProblem& p, const SdpOptions& opt) const = 0;
};

// HKM search direction with Mehrotra predictor-corrector and dense Cholesky of
// the Schur complement. Deterministic for identical input.
class InteriorPointSolver : public SdpBackend {
 public:
  SdpSolution solve(const SdpProblem& p, const SdpOptions& opt) const override;
};

SdpSolution solve(const SdpProblem& p, const SdpOptions& opt = {});

// Orthonormal basis (columns, svec coordinates) of the range of a Hermitian
// idempotent map given by its svec matrix, and of its orthogonal complement.
struct SubspaceBasis {
  Eigen::MatrixXd range;
  Eigen::MatrixXd complement;
};
SubspaceBasis split_subspace(const Eigen::MatrixXd& projector_svec);

}  // namespace qdisc
