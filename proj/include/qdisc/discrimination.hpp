#pragma once

// Discrimination SDPs. For a strategy S and ensemble {p_i, C_i}:
//
//   primal:  maximize sum_i p_i Tr(T_i C_i^{(x)k})  over S-testers {T_i}
//   dual:    minimize lambda  s.t.  p_i C_i^{(x)k} <= lambda W-bar,  W-bar in the
//            dual affine space of S
//
// SEP primal adds two ordered processes W12 + W21 = sum_i T_i; SEP dual
// minimises lambda subject to p_i C_i^{(x)k} <= H <= lambda W-bar12, lambda W-bar21.
// Either formulation yields both witness sets: the multipliers of one are the
// variables of the other.

#include <optional>
#include <vector>

#include "qdisc/channels.hpp"
#include "qdisc/sdp_solver.hpp"
#include "qdisc/strategies.hpp"

namespace qdisc {

enum class Formulation { Primal, Dual, Auto };

struct DiscriminationOptions {
  double tol = 1e-9;
  int max_iter = 120;
  // Auto solves the smaller program: the dual for SEP, the primal otherwise.
  Formulation formulation = Formulation::Auto;
  // Also solve the other formulation and record its optimum.
  bool cross_check = false;
  bool verbose = false;
};

struct DualWitness {
  double lambda = 0.0;
  FloatLabeled wbar;    // non-SEP: p_i C_i <= lambda wbar
  FloatLabeled h;       // SEP: p_i C_i <= h <= lambda wbar12, lambda wbar21
  FloatLabeled wbar12;
  FloatLabeled wbar21;
};

struct DiscriminationResult {
  Strategy strategy = Strategy::Par;
  Formulation solved = Formulation::Primal;
  SdpStatus status = SdpStatus::NumericalFailure;
  int iterations = 0;
  double value = 0.0;         // optimum of the solved program
  double primal_value = 0.0;  // sum_i p_i Tr(T_i C_i) of the extracted tester
  double dual_value = 0.0;    // lambda of the extracted dual witness
  double gap = 0.0;           // solver gap
  double primal_residual = 0.0;
  double dual_residual = 0.0;

  std::vector<FloatLabeled> tester;
  std::optional<FloatLabeled> w12;  // SEP only
  std::optional<FloatLabeled> w21;
  DualWitness dual;

  std::optional<double> cross_check_value;
};

// Float feasibility defects of the extracted tester: Frobenius norm of the
// projector defect (worst ordered part for SEP, plus the sum defect), smallest
// eigenvalue over all PSD pieces, and |Tr W - process_trace|.
struct WitnessResiduals {
  double projector_defect = 0.0;
  double min_eigenvalue = 0.0;
  double trace_defect = 0.0;
};
WitnessResiduals witness_residuals(const DiscriminationResult& r);

SdpProblem build_primal(const Ensemble& e, Strategy s);
SdpProblem build_dual(const Ensemble& e, Strategy s);

DiscriminationResult discriminate(const Ensemble& e, Strategy s, const DiscriminationOptions& opt = {});

// Orthonormal range / complement bases (svec coordinates) of a projector map
// on a slot space. Cached; safe to call from several threads.
const SubspaceBasis& projector_basis(const ProjectorMap& p, const SpaceStructure& space);

// Float SEP membership: minimal t >= 0 with W + t * (Tr W / dim) 1 = W12 + W21,
// W12 and W21 positive and inside their ordered spans. W is accepted iff it is
// a valid GEN process and t <= tol.
struct SepMembership {
  bool member = false;
  double t = 0.0;
  SdpStatus status = SdpStatus::NumericalFailure;
};
SepMembership sep_membership(const FloatLabeled& w, double tol = 1e-9);

Eigen::MatrixXcd to_eigen(const FloatLabeled& m);
FloatLabeled from_eigen(const SpaceStructure& space, const Eigen::MatrixXcd& m);

}  // namespace qdisc
