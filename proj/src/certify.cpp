#include "qdisc/certify.hpp"

#include <algorithm>
#include <optional>
#include <set>

namespace qdisc {

std::string to_string(Direction d) { return d == Direction::Lower ? "lower" : "upper"; }

Direction parse_direction(const std::string& s) {
  if (s == "lower") return Direction::Lower;
  if (s == "upper") return Direction::Upper;
  throw std::invalid_argument("unknown bound direction '" + s + "'");
}

const ExactLabeled& Certificate::witness(const std::string& name) const {
  for (const auto& w : witnesses)
    if (w.name == name) return w.matrix;
  throw std::invalid_argument("certificate has no witness '" + name + "'");
}

std::vector<std::int64_t> Certificate::radicands() const {
  std::set<std::int64_t> found;
  for (const auto& c : chois) {
    for (const auto& z : c.entries.data()) {
      if (z.re.radicand() != 0) found.insert(z.re.radicand());
      if (z.im.radicand() != 0) found.insert(z.im.radicand());
    }
  }
  return {found.begin(), found.end()};
}

namespace {

ExactLabeled exact_of(const FloatLabeled& m) { return ExactLabeled(m.space, hermitize(to_exact(m.entries))); }

ExactMatrix scaled_identity(std::size_t n, const Rational& c) {
  ExactMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = ExactComplex(c);
  return out;
}

ExactMatrix scaled(const ExactMatrix& m, const Rational& c) { return m * ExactComplex(c); }

Rational real_rational(const ExactComplex& z) {
  if (!z.im.is_zero() || !z.re.is_rational()) throw CertificationFailed("expected a rational scalar");
  return z.re.a();
}

Rational trace_rational(const ExactMatrix& m) { return real_rational(m.trace()); }

SpaceStructure space_of(const Certificate& c) {
  return slot_space(c.copies, c.chois.at(0).space.systems().at(0).dim, c.chois.at(0).space.systems().at(1).dim);
}

// D_eta(X) = eta X + (1 - eta) 1.
ExactMatrix depol(const Rational& eta, const ExactMatrix& x) { return depolarize(eta, x); }

bool commutes(const ProjectorMap& p, const Rational& eta, const ExactLabeled& x) {
  const ExactLabeled px = p.apply(x);
  const ExactLabeled d(x.space, depol(eta, px.entries));
  return p.apply(d).entries == d.entries;
}

RadicalSum success_probability(const Certificate& c, const std::vector<ExactLabeled>& powers) {
  RadicalSum out;
  for (std::size_t i = 0; i < powers.size(); ++i) {
    const QuadExt term = real_trace_of_product(powers[i].entries, c.witness("T" + std::to_string(i + 1)).entries);
    out += RadicalSum(term) * c.priors[i];
  }
  return out;
}

struct PsdJob {
  std::string subject;
  ExactMatrix matrix;
};

std::vector<CheckRecord> run_psd(std::vector<PsdJob>& jobs, Execution exec) {
  std::vector<int> ok(jobs.size(), 0);
  const long count = static_cast<long>(jobs.size());
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < count; ++k) {
      const auto& m = jobs[static_cast<std::size_t>(k)].matrix;
      ok[static_cast<std::size_t>(k)] = is_hermitian(m) && is_psd_exact(m);
    }
  } else {
    for (long k = 0; k < count; ++k) {
      const auto& m = jobs[static_cast<std::size_t>(k)].matrix;
      ok[static_cast<std::size_t>(k)] = is_hermitian(m) && is_psd_exact(m);
    }
  }
  std::vector<CheckRecord> out;
  for (std::size_t k = 0; k < jobs.size(); ++k) out.push_back({"psd", jobs[k].subject, ok[k] != 0});
  return out;
}

bool all_passed(const std::vector<CheckRecord>& t) {
  return std::all_of(t.begin(), t.end(), [](const CheckRecord& r) { return r.passed; });
}

std::string first_failure(const std::vector<CheckRecord>& t) {
  for (const auto& r : t)
    if (!r.passed) return r.check + "(" + r.subject + ")";
  return "none";
}

Certificate skeleton(const Ensemble& e, Strategy s, Direction d) {
  if (!e.has_exact()) throw CertificationFailed("ensemble has no exact flavour");
  Certificate c;
  c.strategy = s;
  c.direction = d;
  c.ensemble_spec = e.spec();
  c.copies = e.copies();
  for (std::size_t i = 0; i < e.size(); ++i) {
    c.priors.push_back(e.prior_exact(i));
    c.chois.push_back(e.exact_choi(i));
  }
  return c;
}

// p_upper candidates: ceil(lambda) on the grid, then + grid * 2^k up to the cap.
std::vector<Rational> upper_schedule(double lambda, const CertifyOptions& opt) {
  const mpz_class den = opt.grid.get_den();
  const mpz_class num = opt.grid.get_num();
  if (num != 1) throw std::invalid_argument("CertifyOptions: grid must be 1/n");
  const Rational base = ceil_to_grid(float_to_rational(lambda), den);
  std::vector<Rational> out{base};
  for (Rational slack = opt.grid; slack <= opt.slack_cap; slack *= 2) out.push_back(base + slack);
  return out;
}

void finish(Certificate& c, Execution exec) {
  c.transcript = run_checks(c, exec);
  if (!all_passed(c.transcript)) {
    throw CertificationFailed("exact check failed: " + first_failure(c.transcript));
  }
}

}  // namespace

ExactLabeled rationalize_to_subspace(const FloatLabeled& m, const ProjectorMap& p, const Rational& gamma) {
  const ExactLabeled projected = p.apply(exact_of(m));
  const Rational tr = trace_rational(projected.entries);
  if (tr == 0) throw CertificationFailed("rationalize_to_subspace: projected matrix is traceless");
  return ExactLabeled(m.space, scaled(projected.entries, gamma / tr));
}

std::vector<ExactLabeled> exact_powers(const Certificate& c) {
  std::vector<ExactLabeled> out;
  for (const auto& choi : c.chois) {
    ExactLabeled first = relabel(choi, {"I1", "O1"});
    out.push_back(c.copies == 1 ? first : kron(first, relabel(choi, {"I2", "O2"})));
  }
  return out;
}

std::vector<CheckRecord> run_checks(const Certificate& c, Execution exec) {
  std::vector<CheckRecord> out;
  const SpaceStructure space = space_of(c);
  const std::size_t n = space.total_dim();
  const std::vector<ExactLabeled> powers = exact_powers(c);
  std::vector<ExactMatrix> weighted;
  for (std::size_t i = 0; i < powers.size(); ++i) weighted.push_back(scaled(powers[i].entries, c.priors[i]));
  std::vector<PsdJob> psd;

  auto check = [&](const std::string& kind, const std::string& subject, bool passed) {
    out.push_back({kind, subject, passed});
  };
  auto in_space = [&](const std::string& name) {
    const ExactLabeled& w = c.witness(name);
    const bool ok = w.space == space;
    check("space", name, ok);
    return ok;
  };
  for (const auto& w : c.witnesses)
    if (!in_space(w.name)) return out;

  const std::size_t count = c.chois.size();
  if (c.direction == Direction::Lower) {
    ExactMatrix sum(n, n);
    for (std::size_t i = 0; i < count; ++i) {
      const std::string name = "T" + std::to_string(i + 1);
      const ExactMatrix& t = c.witness(name).entries;
      check("hermitian", name, is_hermitian(t));
      psd.push_back({name, t});
      sum += t;
    }
    const Rational gamma = process_trace(space);
    if (c.strategy == Strategy::Sep) {
      const ExactLabeled& w12 = c.witness("W12");
      const ExactLabeled& w21 = c.witness("W21");
      const ProjectorMap p12 = process_projector(Strategy::Seq12, c.copies);
      const ProjectorMap p21 = process_projector(Strategy::Seq21, c.copies);
      check("hermitian", "W12", is_hermitian(w12.entries));
      check("hermitian", "W21", is_hermitian(w21.entries));
      psd.push_back({"W12", w12.entries});
      psd.push_back({"W21", w21.entries});
      check("subspace", "W12", p12.apply(w12).entries == w12.entries);
      check("subspace", "W21", p21.apply(w21).entries == w21.entries);
      check("sum", "T=W12+W21", sum == w12.entries + w21.entries);
      check("trace", "W12+W21", (w12.entries + w21.entries).trace() == ExactComplex(gamma));
      check("commutation", "W12", commutes(p12, c.eta, w12));
      check("commutation", "W21", commutes(p21, c.eta, w21));
    } else {
      const ProjectorMap p = process_projector(c.strategy, c.copies);
      const ExactLabeled w(space, sum);
      check("subspace", "sum T", p.apply(w).entries == sum);
      check("trace", "sum T", sum.trace() == ExactComplex(gamma));
      check("commutation", "sum T", commutes(p, c.eta, w));
    }
    check("bound", "sum p_i Tr(C_i T_i)", success_probability(c, powers) == c.bound);
  } else {
    if (!c.bound.is_rational()) {
      check("bound", "rational", false);
      return out;
    }
    const Rational bound = c.bound.rational_part();
    const Rational gamma = dual_trace(space);
    auto dual_checks = [&](const std::string& name, Strategy s) {
      const ExactLabeled& w = c.witness(name);
      const ProjectorMap p = dual_projector(s, c.copies);
      check("hermitian", name, is_hermitian(w.entries));
      check("subspace", name, p.apply(w).entries == w.entries);
      check("trace", name, w.entries.trace() == ExactComplex(gamma));
      check("commutation", name, commutes(p, c.eta, w));
    };
    if (c.strategy == Strategy::Sep) {
      const ExactMatrix& h = c.witness("H").entries;
      check("hermitian", "H", is_hermitian(h));
      dual_checks("Wbar12", Strategy::Seq12);
      dual_checks("Wbar21", Strategy::Seq21);
      for (std::size_t i = 0; i < count; ++i) psd.push_back({"H-p" + std::to_string(i + 1) + "C", h - weighted[i]});
      psd.push_back({"bound*Wbar12-H", scaled(c.witness("Wbar12").entries, bound) - h});
      psd.push_back({"bound*Wbar21-H", scaled(c.witness("Wbar21").entries, bound) - h});
    } else {
      dual_checks("Wbar", c.strategy);
      const ExactMatrix wb = scaled(c.witness("Wbar").entries, bound);
      for (std::size_t i = 0; i < count; ++i) psd.push_back({"bound*Wbar-p" + std::to_string(i + 1) + "C", wb - weighted[i]});
    }
  }
  for (auto& r : run_psd(psd, exec)) out.push_back(std::move(r));
  return out;
}

bool verify(const Certificate& c, Execution exec) {
  try {
    const std::vector<CheckRecord> replay = run_checks(c, exec);
    return all_passed(replay) && replay == c.transcript;
  } catch (const std::exception&) {
    return false;
  }
}

Certificate certify_lower(const std::vector<FloatLabeled>& tester, const Ensemble& e, Strategy s,
                          const CertifyOptions& opt) {
  if (s == Strategy::Sep) throw std::invalid_argument("certify_lower: use certify_sep_lower for SEP");
  if (tester.size() != e.size()) throw std::invalid_argument("certify_lower: one tester element per channel");
  Certificate c = skeleton(e, s, Direction::Lower);
  const SpaceStructure space = slot_space(e.copies(), e.d_in(), e.d_out());
  const std::size_t n = space.total_dim();
  const ProjectorMap p = process_projector(s, e.copies());
  const Rational gamma = process_trace(space);

  std::vector<ExactMatrix> t;
  ExactMatrix w(n, n);
  for (const auto& f : tester) {
    t.push_back(exact_of(f).entries);
    w += t.back();
  }
  const ExactLabeled pw = p.apply(ExactLabeled(space, w));
  const ExactMatrix empty = pw.entries - w;

  std::vector<ExactMatrix> candidates = t;
  candidates.push_back(empty);
  const std::vector<ExactMatrix> targets(candidates.size(), ExactMatrix::identity(n));
  c.eta = common_eta(candidates, targets, opt.eta_steps, opt.exec);
  if (!commutes(p, c.eta, pw)) throw CertificationFailed("D_eta does not commute with the projector");

  const ExactMatrix d_empty = depol(c.eta, empty);
  ExactMatrix w_eta = d_empty;
  std::vector<ExactMatrix> d;
  for (const auto& ti : t) {
    d.push_back(depol(c.eta, ti));
    w_eta += d.back();
  }
  const Rational scale = gamma / trace_rational(w_eta);
  const ExactMatrix share = scaled(d_empty, Rational(1, static_cast<unsigned long>(t.size())));
  for (std::size_t i = 0; i < t.size(); ++i) {
    c.witnesses.push_back({"T" + std::to_string(i + 1), ExactLabeled(space, scaled(d[i] + share, scale))});
  }
  c.bound = success_probability(c, exact_powers(c));
  finish(c, opt.exec);
  return c;
}

Certificate certify_upper(const DualWitness& dual, const Ensemble& e, Strategy s, const CertifyOptions& opt) {
  if (s == Strategy::Sep) throw std::invalid_argument("certify_upper: use certify_sep_upper for SEP");
  Certificate c = skeleton(e, s, Direction::Upper);
  const SpaceStructure space = slot_space(e.copies(), e.d_in(), e.d_out());
  const std::size_t n = space.total_dim();
  const ProjectorMap p = dual_projector(s, e.copies());
  const Rational gamma = dual_trace(space);

  const ExactMatrix projected = p.apply(exact_of(dual.wbar)).entries;
  const std::vector<ExactMatrix> candidate{projected};
  const std::vector<ExactMatrix> target{ExactMatrix::identity(n)};
  c.eta = common_eta(candidate, target, opt.eta_steps, opt.exec);
  const ExactMatrix mixed = depol(c.eta, projected);
  const ExactMatrix wbar = scaled(mixed, gamma / trace_rational(mixed));
  c.witnesses.push_back({"Wbar", ExactLabeled(space, wbar)});

  std::vector<ExactMatrix> weighted;
  for (std::size_t i = 0; i < e.size(); ++i) weighted.push_back(scaled(e.exact_power(i).entries, e.prior_exact(i)));

  for (const Rational& candidate_bound : upper_schedule(dual.lambda, opt)) {
    std::vector<ExactMatrix> gaps;
    const ExactMatrix wb = scaled(wbar, candidate_bound);
    for (const auto& wi : weighted) gaps.push_back(wb - wi);
    if (all_psd_exact(gaps, opt.exec)) {
      c.bound = RadicalSum(candidate_bound);
      finish(c, opt.exec);
      return c;
    }
  }
  throw CertificationFailed("certify_upper: slack budget exhausted for " + to_string(s));
}

Certificate certify_sep_lower(const std::vector<FloatLabeled>& tester, const FloatLabeled& w12f,
                              const FloatLabeled& w21f, const Ensemble& e, const CertifyOptions& opt) {
  if (e.copies() != 2) throw Unsupported("separable strategies need two copies");
  if (tester.size() != e.size()) throw std::invalid_argument("certify_sep_lower: one tester element per channel");
  Certificate c = skeleton(e, Strategy::Sep, Direction::Lower);
  const SpaceStructure space = slot_space(2, e.d_in(), e.d_out());
  const std::size_t n = space.total_dim();
  const Rational gamma = process_trace(space);
  const ProjectorMap p12 = process_projector(Strategy::Seq12, 2);
  const ProjectorMap p21 = process_projector(Strategy::Seq21, 2);

  const ExactMatrix a12 = p12.apply(exact_of(w12f)).entries;
  const ExactMatrix a21 = p21.apply(exact_of(w21f)).entries;
  const Rational mass = trace_rational(a12) + trace_rational(a21);
  if (mass <= 0) throw CertificationFailed("certify_sep_lower: ordered parts carry no trace");
  ExactMatrix w12 = scaled(a12, gamma / mass);
  ExactMatrix w21 = scaled(a21, gamma / mass);

  std::vector<ExactMatrix> t;
  ExactMatrix sum(n, n);
  for (const auto& f : tester) {
    t.push_back(exact_of(f).entries);
    sum += t.back();
  }
  t.back() += w12 + w21 - sum;

  const Rational white = gamma / static_cast<unsigned long>(n);
  const Rational per_outcome = white / static_cast<unsigned long>(t.size());
  std::vector<ExactMatrix> candidates = t;
  std::vector<ExactMatrix> targets(t.size(), scaled_identity(n, per_outcome));
  candidates.push_back(w12);
  candidates.push_back(w21);
  targets.push_back(scaled_identity(n, white / 2));
  targets.push_back(scaled_identity(n, white / 2));
  c.eta = common_eta(candidates, targets, opt.eta_steps, opt.exec);

  for (std::size_t i = 0; i < t.size(); ++i) {
    c.witnesses.push_back({"T" + std::to_string(i + 1), ExactLabeled(space, mix(c.eta, t[i], targets[i]))});
  }
  c.witnesses.push_back({"W12", ExactLabeled(space, mix(c.eta, w12, targets[t.size()]))});
  c.witnesses.push_back({"W21", ExactLabeled(space, mix(c.eta, w21, targets[t.size() + 1]))});
  c.bound = success_probability(c, exact_powers(c));
  finish(c, opt.exec);
  return c;
}

Certificate certify_sep_upper(const DualWitness& dual, const Ensemble& e, const CertifyOptions& opt) {
  if (e.copies() != 2) throw Unsupported("separable strategies need two copies");
  Certificate c = skeleton(e, Strategy::Sep, Direction::Upper);
  const SpaceStructure space = slot_space(2, e.d_in(), e.d_out());
  const std::size_t n = space.total_dim();
  const Rational gamma = dual_trace(space);
  const ProjectorMap q12 = dual_projector(Strategy::Seq12, 2);
  const ProjectorMap q21 = dual_projector(Strategy::Seq21, 2);

  const ExactMatrix a12 = q12.apply(exact_of(dual.wbar12)).entries;
  const ExactMatrix a21 = q21.apply(exact_of(dual.wbar21)).entries;
  const std::vector<ExactMatrix> candidates{a12, a21};
  const std::vector<ExactMatrix> targets{ExactMatrix::identity(n), ExactMatrix::identity(n)};
  c.eta = common_eta(candidates, targets, opt.eta_steps, opt.exec);
  const ExactMatrix m12 = depol(c.eta, a12);
  const ExactMatrix m21 = depol(c.eta, a21);
  const ExactMatrix wbar12 = scaled(m12, gamma / trace_rational(m12));
  const ExactMatrix wbar21 = scaled(m21, gamma / trace_rational(m21));
  const ExactMatrix h = exact_of(dual.h).entries;

  std::vector<ExactMatrix> weighted;
  for (std::size_t i = 0; i < e.size(); ++i) weighted.push_back(scaled(e.exact_power(i).entries, e.prior_exact(i)));

  // Inflating H by delta buys room against p_i C_i; the bound margin pays for
  // it through the smallest eigenvalue of the two dual processes.
  const double floor_eig = std::min(min_eigenvalue(to_float(wbar12)), min_eigenvalue(to_float(wbar21)));
  const Rational lambda = float_to_rational(dual.lambda);
  for (const Rational& bound : upper_schedule(dual.lambda, opt)) {
    Rational delta = 0;
    if (bound > lambda && floor_eig > 0) delta = float_to_rational(Rational(bound - lambda).get_d() * floor_eig / 2);
    const ExactMatrix hd = h + scaled_identity(n, delta);
    std::vector<ExactMatrix> gaps;
    for (const auto& wi : weighted) gaps.push_back(hd - wi);
    gaps.push_back(scaled(wbar12, bound) - hd);
    gaps.push_back(scaled(wbar21, bound) - hd);
    if (!all_psd_exact(gaps, opt.exec)) continue;
    c.bound = RadicalSum(bound);
    c.witnesses.push_back({"H", ExactLabeled(space, hd)});
    c.witnesses.push_back({"Wbar12", ExactLabeled(space, wbar12)});
    c.witnesses.push_back({"Wbar21", ExactLabeled(space, wbar21)});
    finish(c, opt.exec);
    return c;
  }
  throw CertificationFailed("certify_sep_upper: slack budget exhausted");
}

Certificate certify(const DiscriminationResult& r, const Ensemble& e, Direction d, const CertifyOptions& opt) {
  if (r.strategy == Strategy::Sep) {
    if (d == Direction::Lower) {
      if (!r.w12 || !r.w21) throw std::invalid_argument("certify: SEP result lacks ordered parts");
      return certify_sep_lower(r.tester, *r.w12, *r.w21, e, opt);
    }
    return certify_sep_upper(r.dual, e, opt);
  }
  return d == Direction::Lower ? certify_lower(r.tester, e, r.strategy, opt) : certify_upper(r.dual, e, r.strategy, opt);
}

}  // namespace qdisc

namespace qdisc {

std::vector<CertifiedStrategy> certify_strategies(const Ensemble& e, const std::vector<Strategy>& strategies,
                                                  const DiscriminationOptions& sopt, const CertifyOptions& copt) {
  std::vector<CertifiedStrategy> out;
  for (Strategy s : strategies) {
    CertifiedStrategy c;
    c.strategy = s;
    c.solve = discriminate(e, s, sopt);
    c.lower = certify(c.solve, e, Direction::Lower, copt);
    c.upper = certify(c.solve, e, Direction::Upper, copt);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<HierarchyLevel> hierarchy_levels(const std::vector<CertifiedStrategy>& certified) {
  auto level_of = [](Strategy s) {
    switch (s) {
      case Strategy::Par: return 0;
      case Strategy::Seq12:
      case Strategy::Seq21: return 1;
      case Strategy::Sep: return 2;
      case Strategy::Gen: return 3;
    }
    return 0;
  };
  static const char* const names[] = {"par", "seq", "sep", "gen"};
  std::vector<std::optional<HierarchyLevel>> slots(4);
  for (const auto& c : certified) {
    auto& slot = slots[static_cast<std::size_t>(level_of(c.strategy))];
    if (!slot) {
      slot = HierarchyLevel{names[level_of(c.strategy)], c.lower.bound, c.upper.bound};
      continue;
    }
    if (c.lower.bound > slot->lower) slot->lower = c.lower.bound;
    if (c.upper.bound > slot->upper) slot->upper = c.upper.bound;
  }
  std::vector<HierarchyLevel> out;
  for (auto& s : slots)
    if (s) out.push_back(std::move(*s));
  return out;
}

bool strict_hierarchy(const std::vector<HierarchyLevel>& levels) {
  if (levels.size() < 2) return false;
  for (std::size_t k = 0; k + 1 < levels.size(); ++k)
    if (!(levels[k].upper < levels[k + 1].lower)) return false;
  return true;
}

}  // namespace qdisc
