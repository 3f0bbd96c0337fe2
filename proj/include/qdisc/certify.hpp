#pragma once

// Turns float SDP witnesses into exact objects that satisfy their defining
// constraints without rounding, and reads off rigorous bounds.
//
// Upper bounds come from dual witnesses (p_i C_i <= p_upper W-bar), lower
// bounds from testers. SEP has no projector, so both SEP directions work on
// the two ordered parts separately and mix everything jointly toward white
// noise, which is parallel and hence inside both orders.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdisc/channels.hpp"
#include "qdisc/discrimination.hpp"
#include "qdisc/exact_matrix.hpp"
#include "qdisc/strategies.hpp"

namespace qdisc {

class CertificationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Direction { Lower, Upper };
std::string to_string(Direction d);
Direction parse_direction(const std::string& s);

struct CheckRecord {
  std::string check;    // hermitian, psd, subspace, trace, sum, commutation, bound
  std::string subject;  // witness name(s) involved
  bool passed = false;

  friend bool operator==(const CheckRecord&, const CheckRecord&) = default;
};

struct NamedWitness {
  std::string name;
  ExactLabeled matrix;
};

struct Certificate {
  Strategy strategy = Strategy::Par;
  Direction direction = Direction::Lower;
  std::string ensemble_spec;
  int copies = 2;
  std::vector<Rational> priors;
  std::vector<ExactLabeled> chois;  // single-copy exact Choi operators on (I, O)

  RadicalSum bound;
  Rational eta = 1;  // depolarisation used (1 = none)
  // Lower: T1..TN (+ W12, W21 for SEP). Upper: Wbar, or H, Wbar12, Wbar21 for SEP.
  std::vector<NamedWitness> witnesses;
  std::vector<CheckRecord> transcript;

  const ExactLabeled& witness(const std::string& name) const;
  // Squarefree radicands appearing in the ensemble (empty when all rational).
  std::vector<std::int64_t> radicands() const;
};

struct CertifyOptions {
  // p_upper starts at the float optimum rounded up to this grid...
  Rational grid = Rational(1, 1000000);
  // ...and on failure adds slack grid, 2 grid, 4 grid, ... up to this cap.
  Rational slack_cap = Rational(1, 100);
  int eta_steps = 60;
  Execution exec = Execution::Parallel;
};

// Rationalisation without the positivity step: exact value of the float entries,
// hermitised, projected, rescaled to trace gamma.
ExactLabeled rationalize_to_subspace(const FloatLabeled& m, const ProjectorMap& p, const Rational& gamma);

Certificate certify_upper(const DualWitness& dual, const Ensemble& e, Strategy s, const CertifyOptions& opt = {});
Certificate certify_lower(const std::vector<FloatLabeled>& tester, const Ensemble& e, Strategy s,
                          const CertifyOptions& opt = {});
Certificate certify_sep_lower(const std::vector<FloatLabeled>& tester, const FloatLabeled& w12,
                              const FloatLabeled& w21, const Ensemble& e, const CertifyOptions& opt = {});
Certificate certify_sep_upper(const DualWitness& dual, const Ensemble& e, const CertifyOptions& opt = {});

// Dispatches on strategy and direction using the witnesses of a solve.
Certificate certify(const DiscriminationResult& r, const Ensemble& e, Direction d, const CertifyOptions& opt = {});

// Every exact check implied by the certificate's strategy and direction,
// evaluated on its witnesses.
std::vector<CheckRecord> run_checks(const Certificate& c, Execution exec = Execution::Parallel);

// True iff every check passes, the checks match the stored transcript, and
// the bound recomputes to the stored value.
bool verify(const Certificate& c, Execution exec = Execution::Parallel);

struct CertifiedStrategy {
  Strategy strategy = Strategy::Par;
  DiscriminationResult solve;
  Certificate lower;
  Certificate upper;
};

// Solve and certify both directions for each strategy in turn.
std::vector<CertifiedStrategy> certify_strategies(const Ensemble& e, const std::vector<Strategy>& strategies,
                                                  const DiscriminationOptions& sopt = {},
                                                  const CertifyOptions& copt = {});

struct HierarchyLevel {
  std::string name;  // par, seq, sep, gen
  RadicalSum lower;
  RadicalSum upper;
};

// Collapses the certified strategies onto the chain PAR, SEQ, SEP, GEN (SEQ is
// the better of the orders present), skipping absent levels.
std::vector<HierarchyLevel> hierarchy_levels(const std::vector<CertifiedStrategy>& certified);

// upper(level k) < lower(level k+1) for every consecutive pair; false when
// fewer than two levels are present.
bool strict_hierarchy(const std::vector<HierarchyLevel>& levels);

// Ensemble members' C^{(x)k} on the certificate's slot space.
std::vector<ExactLabeled> exact_powers(const Certificate& c);

}  // namespace qdisc
