#include "qdisc/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "qdisc/discrimination.hpp"
#include "qdisc/exact_matrix.hpp"

namespace qdisc {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Par:
      return "par";
    case Strategy::Seq12:
      return "seq12";
    case Strategy::Seq21:
      return "seq21";
    case Strategy::Sep:
      return "sep";
    case Strategy::Gen:
      return "gen";
  }
  return "?";
}

Strategy parse_strategy(const std::string& name) {
  for (Strategy s : all_strategies())
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown strategy '" + name + "' (expected par, seq12, seq21, sep or gen)");
}

const std::vector<Strategy>& all_strategies() {
  static const std::vector<Strategy> all{Strategy::Par, Strategy::Seq12, Strategy::Seq21, Strategy::Sep,
                                         Strategy::Gen};
  return all;
}

ProjectorMap::ProjectorMap(std::vector<Term> terms) : terms_(std::move(terms)) { canonicalise(); }

ProjectorMap ProjectorMap::identity() { return ProjectorMap({Term{Rational(1), {}}}); }

ProjectorMap ProjectorMap::trace_and_replace(std::set<std::string> labels) {
  return ProjectorMap({Term{Rational(1), std::move(labels)}});
}

void ProjectorMap::canonicalise() {
  std::map<std::set<std::string>, Rational> acc;
  for (const auto& t : terms_) acc[t.labels] += t.coef;
  terms_.clear();
  for (auto& [labels, coef] : acc)
    if (coef != 0) terms_.push_back(Term{coef, labels});
}

std::vector<std::pair<std::set<std::string>, Rational>> ProjectorMap::terms_key() const {
  std::vector<std::pair<std::set<std::string>, Rational>> out;
  for (const auto& t : terms_) out.emplace_back(t.labels, t.coef);
  return out;
}

namespace {

cplx scalar_of(const Rational& q, const cplx*) { return cplx(q.get_d()); }
ExactComplex scalar_of(const Rational& q, const ExactComplex*) { return ExactComplex(q); }

}  // namespace

template <class T>
LabeledMatrix<T> ProjectorMap::apply(const LabeledMatrix<T>& a) const {
  LabeledMatrix<T> out(a.space, DenseMatrix<T>(a.dim(), a.dim()));
  for (const auto& t : terms_) {
    const std::vector<std::string> labels(t.labels.begin(), t.labels.end());
    LabeledMatrix<T> piece = qdisc::trace_and_replace(a, labels);
    if (t.coef != 1) piece.entries *= scalar_of(t.coef, static_cast<const T*>(nullptr));
    out.entries += piece.entries;
  }
  return out;
}

template LabeledMatrix<cplx> ProjectorMap::apply(const LabeledMatrix<cplx>&) const;
template LabeledMatrix<ExactComplex> ProjectorMap::apply(const LabeledMatrix<ExactComplex>&) const;

ProjectorMap ProjectorMap::compose(const ProjectorMap& other) const {
  std::vector<Term> out;
  for (const auto& a : terms_)
    for (const auto& b : other.terms_) {
      std::set<std::string> labels = a.labels;
      labels.insert(b.labels.begin(), b.labels.end());
      out.push_back(Term{a.coef * b.coef, std::move(labels)});
    }
  return ProjectorMap(std::move(out));
}

ProjectorMap ProjectorMap::operator+(const ProjectorMap& o) const {
  std::vector<Term> out = terms_;
  out.insert(out.end(), o.terms_.begin(), o.terms_.end());
  return ProjectorMap(std::move(out));
}

ProjectorMap ProjectorMap::operator-(const ProjectorMap& o) const { return *this + o.scaled(Rational(-1)); }

ProjectorMap ProjectorMap::scaled(const Rational& s) const {
  std::vector<Term> out = terms_;
  for (auto& t : out) t.coef *= s;
  return ProjectorMap(std::move(out));
}

std::string ProjectorMap::to_string() const {
  std::string out;
  for (const auto& t : terms_) {
    if (!out.empty()) out += " ";
    out += t.coef < 0 ? "- " : (out.empty() ? "" : "+ ");
    const Rational mag = abs(t.coef);
    if (mag != 1) out += qdisc::to_string(mag) + "*";
    if (t.labels.empty()) {
      out += "id";
    } else {
      out += "TR{";
      bool first = true;
      for (const auto& l : t.labels) {
        if (!first) out += ",";
        out += l;
        first = false;
      }
      out += "}";
    }
  }
  return out.empty() ? "0" : out;
}

namespace {

using Labels = std::set<std::string>;

ProjectorMap tr(Labels l) { return ProjectorMap::trace_and_replace(std::move(l)); }

ProjectorMap seq12_projector() { return tr({"O2"}) - tr({"I2", "O2"}) + tr({"O1", "I2", "O2"}); }

ProjectorMap seq21_projector() { return tr({"O1"}) - tr({"I1", "O1"}) + tr({"O2", "I1", "O1"}); }

ProjectorMap gen_projector() {
  return tr({"I1", "O1", "O2"}) - tr({"I1", "O1"}) + tr({"O1", "I2", "O2"}) - tr({"I2", "O2"}) + tr({"O1"}) +
         tr({"O2"}) - tr({"O1", "O2"});
}

Labels all_labels(int copies) {
  if (copies == 1) return {"I1", "O1"};
  return {"I1", "O1", "I2", "O2"};
}

}  // namespace

ProjectorMap process_projector(Strategy s, int copies) {
  if (s == Strategy::Sep) throw NotAffine("the separable set is not affine; it has no projector");
  if (copies == 1) {
    if (s != Strategy::Par) throw Unsupported("one-copy discrimination only distinguishes the parallel strategy");
    return tr({"O1"});
  }
  if (copies != 2) throw Unsupported("only one or two copies are supported");
  switch (s) {
    case Strategy::Par:
      return tr({"O1", "O2"});
    case Strategy::Seq12:
      return seq12_projector();
    case Strategy::Seq21:
      return seq21_projector();
    case Strategy::Gen:
      return gen_projector();
    case Strategy::Sep:
      break;
  }
  throw NotAffine("unreachable");
}

ProjectorMap dual_projector(Strategy s, int copies) {
  return ProjectorMap::identity() - process_projector(s, copies) + tr(all_labels(copies));
}

Rational process_trace(const SpaceStructure& space) {
  Rational t = 1;
  for (const auto& sys : space.systems())
    if (!sys.label.empty() && sys.label[0] == 'O') t *= static_cast<unsigned long>(sys.dim);
  return t;
}

Rational dual_trace(const SpaceStructure& space) {
  Rational t = 1;
  for (const auto& sys : space.systems())
    if (!sys.label.empty() && sys.label[0] == 'I') t *= static_cast<unsigned long>(sys.dim);
  return t;
}

SpaceStructure slot_space(int copies, std::size_t d_in, std::size_t d_out) {
  if (copies == 1) return SpaceStructure{{"I1", d_in}, {"O1", d_out}};
  return SpaceStructure{{"I1", d_in}, {"O1", d_out}, {"I2", d_in}, {"O2", d_out}};
}

int copies_of(const SpaceStructure& space) { return space.contains("I2") ? 2 : 1; }

bool is_valid_process(const FloatLabeled& w, Strategy s, double tol) {
  if (s == Strategy::Sep) return sep_membership(w, tol).member;
  if (!is_hermitian(w.entries, tol)) return false;
  const FloatMatrix h = hermitize(w.entries);
  if (min_eigenvalue(h) < -tol) return false;
  const FloatLabeled hw(w.space, h);
  const FloatMatrix defect = process_projector(s, copies_of(w.space)).apply(hw).entries - h;
  for (const auto& z : defect.data())
    if (std::abs(z) > tol) return false;
  return std::abs(h.trace().real() - process_trace(w.space).get_d()) <= tol;
}

bool is_valid_process(const ExactLabeled& w, Strategy s) {
  if (s == Strategy::Sep) throw Unsupported("exact separable-process membership requires exact SDP feasibility");
  if (!is_hermitian(w.entries)) return false;
  if (process_projector(s, copies_of(w.space)).apply(w).entries != w.entries) return false;
  if (w.entries.trace() != ExactComplex(process_trace(w.space))) return false;
  return is_psd_exact(w.entries);
}

namespace {

template <class T>
LabeledMatrix<T> sum_of(const std::vector<LabeledMatrix<T>>& t) {
  if (t.empty()) throw std::invalid_argument("tester has no elements");
  LabeledMatrix<T> w = t[0];
  for (std::size_t k = 1; k < t.size(); ++k) w.entries += t[k].entries;
  return w;
}

}  // namespace

bool is_valid_tester(const std::vector<FloatLabeled>& t, Strategy s, double tol) {
  for (const auto& e : t) {
    if (!is_hermitian(e.entries, tol)) return false;
    if (min_eigenvalue(hermitize(e.entries)) < -tol) return false;
  }
  return is_valid_process(sum_of(t), s, tol);
}

bool is_valid_tester(const std::vector<ExactLabeled>& t, Strategy s) {
  for (const auto& e : t) {
    if (!is_hermitian(e.entries) || !is_psd_exact(e.entries)) return false;
  }
  return is_valid_process(sum_of(t), s);
}

bool in_dual_space(const ExactLabeled& w, Strategy s) {
  if (!is_hermitian(w.entries)) return false;
  if (dual_projector(s, copies_of(w.space)).apply(w).entries != w.entries) return false;
  return w.entries.trace() == ExactComplex(dual_trace(w.space));
}

}  // namespace qdisc
