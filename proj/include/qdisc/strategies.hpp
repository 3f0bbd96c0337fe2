#pragma once

// Strategy classes as projector maps onto the linear span of their process
// sets (and of the dual affine spaces), plus membership predicates.

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdisc/exact_scalar.hpp"
#include "qdisc/tensor.hpp"

namespace qdisc {

enum class Strategy { Par, Seq12, Seq21, Sep, Gen };

std::string to_string(Strategy s);  // "par", "seq12", "seq21", "sep", "gen"
Strategy parse_strategy(const std::string& name);
const std::vector<Strategy>& all_strategies();

class NotAffine : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class Unsupported : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Affine combination sum_k c_k * TR_{S_k} of trace-and-replace maps. The empty
// label set is the identity map.
class ProjectorMap {
 public:
  struct Term {
    Rational coef;
    std::set<std::string> labels;
  };

  ProjectorMap() = default;
  explicit ProjectorMap(std::vector<Term> terms);

  static ProjectorMap identity();
  static ProjectorMap trace_and_replace(std::set<std::string> labels);

  const std::vector<Term>& terms() const { return terms_; }

  template <class T>
  LabeledMatrix<T> apply(const LabeledMatrix<T>& a) const;

  // (this o other)(A) = this(other(A)), using TR_S o TR_T = TR_{S u T}.
  ProjectorMap compose(const ProjectorMap& other) const;

  ProjectorMap operator+(const ProjectorMap& o) const;
  ProjectorMap operator-(const ProjectorMap& o) const;
  ProjectorMap scaled(const Rational& s) const;

  // Symbolic equality of the canonical forms. Terms are distinct maps, so
  // equal canonical forms is also necessary for equality as linear maps.
  friend bool operator==(const ProjectorMap& l, const ProjectorMap& r) { return l.terms_key() == r.terms_key(); }

  bool is_idempotent() const { return compose(*this) == *this; }

  std::string to_string() const;

 private:
  void canonicalise();
  std::vector<std::pair<std::set<std::string>, Rational>> terms_key() const;

  std::vector<Term> terms_;
};

// Process projector for k copies (1 or 2). k = 1 admits only PAR (every
// strategy coincides with it). Throws NotAffine for SEP.
ProjectorMap process_projector(Strategy s, int copies = 2);

// id - P + TR_{all}.
ProjectorMap dual_projector(Strategy s, int copies = 2);

// Tr W = prod d_O, Tr W-bar = prod d_I.
Rational process_trace(const SpaceStructure& space);
Rational dual_trace(const SpaceStructure& space);

// Slot space (I1, O1[, I2, O2]) with d_I, d_O per slot.
SpaceStructure slot_space(int copies, std::size_t d_in, std::size_t d_out);

int copies_of(const SpaceStructure& space);

enum class Mode { FloatTolerance, Exact };

// PSD, W = P(W) and Tr W = process trace. SEP is decided by a float SDP
// feasibility problem; exact mode rejects SEP with Unsupported.
bool is_valid_process(const FloatLabeled& w, Strategy s, double tol = 1e-8);
bool is_valid_process(const ExactLabeled& w, Strategy s);

bool is_valid_tester(const std::vector<FloatLabeled>& t, Strategy s, double tol = 1e-8);
bool is_valid_tester(const std::vector<ExactLabeled>& t, Strategy s);

// Dual-affine-space membership: W-bar = P-bar(W-bar), Tr = dual trace
// (positivity is not part of the definition).
bool in_dual_space(const ExactLabeled& w, Strategy s);

}  // namespace qdisc
