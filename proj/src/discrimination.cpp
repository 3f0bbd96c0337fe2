#include "qdisc/discrimination.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

#include "qdisc/exact_matrix.hpp"

namespace qdisc {

Eigen::MatrixXcd to_eigen(const FloatLabeled& m) { return to_eigen(m.entries); }

FloatLabeled from_eigen(const SpaceStructure& space, const Eigen::MatrixXcd& m) {
  return FloatLabeled(space, from_eigen(m));
}

const SubspaceBasis& projector_basis(const ProjectorMap& p, const SpaceStructure& space) {
  static std::mutex lock;
  static std::map<std::string, std::unique_ptr<SubspaceBasis>> cache;
  std::string key = p.to_string() + "|";
  for (const auto& s : space.systems()) key += s.label + ":" + std::to_string(s.dim) + ";";

  std::lock_guard<std::mutex> guard(lock);
  auto found = cache.find(key);
  if (found != cache.end()) return *found->second;

  const auto n = static_cast<Eigen::Index>(space.total_dim());
  Eigen::MatrixXd matrix(n * n, n * n);
  for (Eigen::Index k = 0; k < n * n; ++k) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(n * n, k);
    const FloatLabeled image = p.apply(from_eigen(space, smat(e, n)));
    matrix.col(k) = svec(to_eigen(image));
  }
  auto basis = std::make_unique<SubspaceBasis>(split_subspace(matrix));
  const SubspaceBasis& ref = *basis;
  cache.emplace(key, std::move(basis));
  return ref;
}

namespace {

Eigen::MatrixXd identity_rows(Eigen::Index n, double scale = 1.0) {
  return Eigen::MatrixXd::Identity(n * n, n * n) * scale;
}

Eigen::MatrixXd trace_row(Eigen::Index n, double scale = 1.0) {
  return svec(Eigen::MatrixXcd::Identity(n, n)).transpose() * scale;
}

std::vector<Eigen::Index> row_range(Eigen::Index first, Eigen::Index count) {
  std::vector<Eigen::Index> out(static_cast<std::size_t>(count));
  for (Eigen::Index k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = first + k;
  return out;
}

struct Setup {
  SpaceStructure space;
  Eigen::Index n = 0;
  double process_tr = 0;
  double dual_tr = 0;
  std::vector<Eigen::MatrixXcd> weighted;  // p_i C_i^{(x)k}
};

Setup setup(const Ensemble& e, Strategy s) {
  if (e.copies() == 1 && s != Strategy::Par) {
    throw Unsupported("one-copy ensembles only support the parallel strategy");
  }
  Setup out;
  out.space = slot_space(e.copies(), e.d_in(), e.d_out());
  out.n = static_cast<Eigen::Index>(out.space.total_dim());
  out.process_tr = process_trace(out.space).get_d();
  out.dual_tr = dual_trace(out.space).get_d();
  for (std::size_t i = 0; i < e.size(); ++i) out.weighted.push_back(to_eigen(e.power(i)) * e.prior(i));
  return out;
}

SdpProblem primal_affine(const Setup& st, Strategy s) {
  const SubspaceBasis& basis = projector_basis(process_projector(s, copies_of(st.space)), st.space);
  const Eigen::Index c = basis.complement.cols();
  SdpProblem p;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(c + 1);
  rhs(c) = st.process_tr;
  p.add_rows(rhs);
  Eigen::MatrixXd coeffs(c + 1, st.n * st.n);
  coeffs << basis.complement.transpose(), trace_row(st.n);
  for (std::size_t i = 0; i < st.weighted.size(); ++i) {
    const std::size_t b = p.add_block(st.n, "T" + std::to_string(i + 1), st.weighted[i]);
    p.set_rows(b, row_range(0, c + 1), coeffs);
  }
  return p;
}

SdpProblem primal_sep(const Setup& st) {
  const int copies = copies_of(st.space);
  const SubspaceBasis& b12 = projector_basis(process_projector(Strategy::Seq12, copies), st.space);
  const SubspaceBasis& b21 = projector_basis(process_projector(Strategy::Seq21, copies), st.space);
  const Eigen::Index nn = st.n * st.n;
  SdpProblem p;
  const Eigen::Index ra = p.add_rows(Eigen::VectorXd::Zero(nn));
  const Eigen::Index r12 = p.add_rows(Eigen::VectorXd::Zero(b12.complement.cols()));
  const Eigen::Index r21 = p.add_rows(Eigen::VectorXd::Zero(b21.complement.cols()));
  const Eigen::Index rd = p.add_rows(Eigen::VectorXd::Constant(1, st.process_tr));

  for (std::size_t i = 0; i < st.weighted.size(); ++i) {
    const std::size_t b = p.add_block(st.n, "T" + std::to_string(i + 1), st.weighted[i]);
    p.set_rows(b, row_range(ra, nn), identity_rows(st.n));
  }
  const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(st.n, st.n);
  const std::size_t w12 = p.add_block(st.n, "W12", zero);
  p.set_rows(w12, row_range(ra, nn), identity_rows(st.n, -1.0));
  p.set_rows(w12, row_range(r12, b12.complement.cols()), b12.complement.transpose());
  p.set_rows(w12, {rd}, trace_row(st.n));
  const std::size_t w21 = p.add_block(st.n, "W21", zero);
  p.set_rows(w21, row_range(ra, nn), identity_rows(st.n, -1.0));
  p.set_rows(w21, row_range(r21, b21.complement.cols()), b21.complement.transpose());
  p.set_rows(w21, {rd}, trace_row(st.n));
  return p;
}

// Blocks S_i = W' - p_i C_i. Rows: S_i - S_N = p_N C_N - p_i C_i for i < N, then
// the complement rows of each listed dual projector on (extra_block_k + S_N).
void dual_common(const Setup& st, SdpProblem& p, std::vector<std::size_t>& s_blocks) {
  const std::size_t count = st.weighted.size();
  const Eigen::Index nn = st.n * st.n;
  const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(st.n, st.n);
  for (std::size_t i = 0; i < count; ++i) {
    Eigen::MatrixXcd c = zero;
    if (i + 1 == count) c = -Eigen::MatrixXcd::Identity(st.n, st.n) / st.dual_tr;
    s_blocks.push_back(p.add_block(st.n, "S" + std::to_string(i + 1), c));
  }
  for (std::size_t i = 0; i + 1 < count; ++i) {
    const Eigen::Index r = p.add_rows(svec(st.weighted.back() - st.weighted[i]));
    p.set_rows(s_blocks[i], row_range(r, nn), identity_rows(st.n));
    p.set_rows(s_blocks.back(), row_range(r, nn), identity_rows(st.n, -1.0));
  }
  p.objective_offset = -st.weighted.back().trace().real() / st.dual_tr;
}

SdpProblem dual_affine(const Setup& st, Strategy s) {
  SdpProblem p;
  std::vector<std::size_t> s_blocks;
  dual_common(st, p, s_blocks);
  const SubspaceBasis& basis = projector_basis(dual_projector(s, copies_of(st.space)), st.space);
  const Eigen::MatrixXd ct = basis.complement.transpose();
  const Eigen::Index r = p.add_rows(-ct * svec(st.weighted.back()));
  p.set_rows(s_blocks.back(), row_range(r, ct.rows()), ct);
  return p;
}

SdpProblem dual_sep(const Setup& st) {
  SdpProblem p;
  std::vector<std::size_t> s_blocks;
  dual_common(st, p, s_blocks);
  const int copies = copies_of(st.space);
  const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(st.n, st.n);
  const std::size_t u12 = p.add_block(st.n, "U12", -Eigen::MatrixXcd::Identity(st.n, st.n) / st.dual_tr);
  const std::size_t u21 = p.add_block(st.n, "U21", zero);
  for (auto [s, u] : {std::pair{Strategy::Seq12, u12}, std::pair{Strategy::Seq21, u21}}) {
    const Eigen::MatrixXd ct = projector_basis(dual_projector(s, copies), st.space).complement.transpose();
    const Eigen::Index r = p.add_rows(-ct * svec(st.weighted.back()));
    p.set_rows(u, row_range(r, ct.rows()), ct);
    p.set_rows(s_blocks.back(), row_range(r, ct.rows()), ct);
  }
  const Eigen::Index r = p.add_rows(Eigen::VectorXd::Zero(1));
  p.set_rows(u12, {r}, trace_row(st.n));
  p.set_rows(u21, {r}, trace_row(st.n, -1.0));
  return p;
}

Formulation resolve(Formulation f, Strategy s) {
  if (f != Formulation::Auto) return f;
  return s == Strategy::Sep ? Formulation::Dual : Formulation::Primal;
}

double lambda_of(const Eigen::MatrixXcd& w, double dual_tr) { return w.trace().real() / dual_tr; }

void extract_from_primal(const Setup& st, Strategy s, const SdpSolution& sol, DiscriminationResult& r) {
  const std::size_t count = st.weighted.size();
  for (std::size_t i = 0; i < count; ++i) r.tester.push_back(from_eigen(st.space, sol.x[i]));
  if (s != Strategy::Sep) {
    const SubspaceBasis& basis = projector_basis(process_projector(s, copies_of(st.space)), st.space);
    const Eigen::Index c = basis.complement.cols();
    const Eigen::MatrixXcd w = smat(basis.complement * sol.y.head(c), st.n) +
                               sol.y(c) * Eigen::MatrixXcd::Identity(st.n, st.n);
    r.dual.lambda = lambda_of(w, st.dual_tr);
    r.dual.wbar = from_eigen(st.space, w / r.dual.lambda);
    return;
  }
  r.w12 = from_eigen(st.space, sol.x[count]);
  r.w21 = from_eigen(st.space, sol.x[count + 1]);
  const int copies = copies_of(st.space);
  const SubspaceBasis& b12 = projector_basis(process_projector(Strategy::Seq12, copies), st.space);
  const SubspaceBasis& b21 = projector_basis(process_projector(Strategy::Seq21, copies), st.space);
  const Eigen::Index nn = st.n * st.n;
  const Eigen::Index c12 = b12.complement.cols();
  const Eigen::Index c21 = b21.complement.cols();
  const double yd = sol.y(nn + c12 + c21);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(st.n, st.n);
  const Eigen::MatrixXcd v12 = smat(b12.complement * sol.y.segment(nn, c12), st.n) + yd * id;
  const Eigen::MatrixXcd v21 = smat(b21.complement * sol.y.segment(nn + c12, c21), st.n) + yd * id;
  r.dual.lambda = lambda_of(v12, st.dual_tr);
  r.dual.h = from_eigen(st.space, smat(sol.y.head(nn), st.n));
  r.dual.wbar12 = from_eigen(st.space, v12 / r.dual.lambda);
  r.dual.wbar21 = from_eigen(st.space, v21 / r.dual.lambda);
}

void extract_from_dual(const Setup& st, Strategy s, const SdpSolution& sol, DiscriminationResult& r) {
  const std::size_t count = st.weighted.size();
  for (std::size_t i = 0; i < count; ++i) r.tester.push_back(from_eigen(st.space, sol.z[i]));
  const Eigen::MatrixXcd h = sol.x[count - 1] + st.weighted.back();
  if (s != Strategy::Sep) {
    r.dual.lambda = lambda_of(h, st.dual_tr);
    r.dual.wbar = from_eigen(st.space, h / r.dual.lambda);
    return;
  }
  r.w12 = from_eigen(st.space, sol.z[count]);
  r.w21 = from_eigen(st.space, sol.z[count + 1]);
  const Eigen::MatrixXcd v12 = sol.x[count] + h;
  const Eigen::MatrixXcd v21 = sol.x[count + 1] + h;
  r.dual.lambda = lambda_of(v12, st.dual_tr);
  r.dual.h = from_eigen(st.space, h);
  r.dual.wbar12 = from_eigen(st.space, v12 / r.dual.lambda);
  r.dual.wbar21 = from_eigen(st.space, v21 / r.dual.lambda);
}

}  // namespace

SdpProblem build_primal(const Ensemble& e, Strategy s) {
  const Setup st = setup(e, s);
  return s == Strategy::Sep ? primal_sep(st) : primal_affine(st, s);
}

SdpProblem build_dual(const Ensemble& e, Strategy s) {
  const Setup st = setup(e, s);
  return s == Strategy::Sep ? dual_sep(st) : dual_affine(st, s);
}

namespace {

SdpProblem problem_for(const Setup& st, Strategy s, Formulation f) {
  if (f == Formulation::Primal) return s == Strategy::Sep ? primal_sep(st) : primal_affine(st, s);
  return s == Strategy::Sep ? dual_sep(st) : dual_affine(st, s);
}

Formulation other(Formulation f) { return f == Formulation::Primal ? Formulation::Dual : Formulation::Primal; }

DiscriminationResult solve_as(const Setup& st, Strategy s, Formulation f, const SdpOptions& so) {
  DiscriminationResult r;
  r.strategy = s;
  r.solved = f;
  const SdpSolution sol = solve(problem_for(st, s, f), so);
  r.status = sol.status;
  r.iterations = sol.iterations;
  r.gap = sol.gap;
  r.primal_residual = sol.primal_residual;
  r.dual_residual = sol.dual_residual;
  if (f == Formulation::Primal) {
    r.value = sol.primal_objective;
    extract_from_primal(st, s, sol, r);
  } else {
    r.value = -sol.primal_objective;
    extract_from_dual(st, s, sol, r);
  }
  r.primal_value = 0.0;
  for (std::size_t i = 0; i < st.weighted.size(); ++i) {
    r.primal_value += (to_eigen(r.tester[i]) * st.weighted[i]).trace().real();
  }
  r.dual_value = r.dual.lambda;
  return r;
}

double merit(const DiscriminationResult& r) { return std::max({r.gap, r.primal_residual, r.dual_residual}); }

}  // namespace

DiscriminationResult discriminate(const Ensemble& e, Strategy s, const DiscriminationOptions& opt) {
  const Setup st = setup(e, s);
  const SdpOptions so{opt.tol, opt.max_iter, opt.verbose};
  DiscriminationResult r = solve_as(st, s, resolve(opt.formulation, s), so);
  // Degenerate instances occasionally stall one formulation; the other one
  // usually converges.
  bool other_done = false;
  if (r.status != SdpStatus::Optimal && opt.formulation == Formulation::Auto) {
    DiscriminationResult alt = solve_as(st, s, other(r.solved), so);
    other_done = true;
    if (alt.status == SdpStatus::Optimal || merit(alt) < merit(r)) {
      alt.cross_check_value = r.value;
      std::swap(r, alt);
    } else {
      r.cross_check_value = alt.value;
    }
  }
  if (opt.cross_check && !other_done) {
    const SdpSolution check = solve(problem_for(st, s, other(r.solved)), so);
    r.cross_check_value = r.solved == Formulation::Primal ? -check.primal_objective : check.primal_objective;
  }
  return r;
}

SepMembership sep_membership(const FloatLabeled& w, double tol) {
  SepMembership out;
  const int copies = copies_of(w.space);
  if (copies != 2) throw Unsupported("separability needs two slots");
  if (!is_valid_process(w, Strategy::Gen, tol)) {
    out.status = SdpStatus::Optimal;
    out.t = std::numeric_limits<double>::infinity();
    return out;
  }
  const SpaceStructure space = slot_space(2, w.space.dim("I1"), w.space.dim("O1"));
  const FloatLabeled wp = permute_systems(w, space.labels());
  const auto n = static_cast<Eigen::Index>(space.total_dim());
  const Eigen::MatrixXcd target = to_eigen(wp);
  const double white = target.trace().real() / static_cast<double>(n);

  const SubspaceBasis& gen = projector_basis(process_projector(Strategy::Gen, 2), space);
  const SubspaceBasis& b12 = projector_basis(process_projector(Strategy::Seq12, 2), space);
  const SubspaceBasis& b21 = projector_basis(process_projector(Strategy::Seq21, 2), space);
  const Eigen::MatrixXd rt = gen.range.transpose();

  SdpProblem p;
  const Eigen::Index ra = p.add_rows(rt * svec((target + target.adjoint()) * 0.5));
  const Eigen::Index r12 = p.add_rows(Eigen::VectorXd::Zero(b12.complement.cols()));
  const Eigen::Index r21 = p.add_rows(Eigen::VectorXd::Zero(b21.complement.cols()));
  const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(n, n);
  const std::size_t w12 = p.add_block(n, "W12", zero);
  p.set_rows(w12, row_range(ra, rt.rows()), rt);
  p.set_rows(w12, row_range(r12, b12.complement.cols()), b12.complement.transpose());
  const std::size_t w21 = p.add_block(n, "W21", zero);
  p.set_rows(w21, row_range(ra, rt.rows()), rt);
  p.set_rows(w21, row_range(r21, b21.complement.cols()), b21.complement.transpose());
  const std::size_t tb = p.add_block(1, "t", -Eigen::MatrixXcd::Identity(1, 1));
  p.set_rows(tb, row_range(ra, rt.rows()), -white * rt * svec(Eigen::MatrixXcd::Identity(n, n)));

  const SdpSolution sol = solve(p, SdpOptions{tol / 10, 150, false});
  out.status = sol.status;
  out.t = sol.x[tb](0, 0).real();
  out.member = out.t <= tol;
  return out;
}

}  // namespace qdisc

namespace qdisc {

WitnessResiduals witness_residuals(const DiscriminationResult& r) {
  WitnessResiduals out;
  if (r.tester.empty()) return out;
  const SpaceStructure& space = r.tester.front().space;
  const int copies = copies_of(space);
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(space.total_dim()), static_cast<Eigen::Index>(space.total_dim()));
  double min_eig = std::numeric_limits<double>::infinity();
  auto smallest = [&](const FloatLabeled& m) {
    min_eig = std::min(min_eig, min_eigenvalue(m.entries));
  };
  for (const auto& t : r.tester) {
    w += to_eigen(t);
    smallest(t);
  }
  const double gamma = process_trace(space).get_d();
  if (r.strategy == Strategy::Sep) {
    if (!r.w12 || !r.w21) throw std::invalid_argument("witness_residuals: SEP result lacks ordered parts");
    smallest(*r.w12);
    smallest(*r.w21);
    const ProjectorMap p12 = process_projector(Strategy::Seq12, copies);
    const ProjectorMap p21 = process_projector(Strategy::Seq21, copies);
    const double d12 = (to_eigen(p12.apply(*r.w12)) - to_eigen(*r.w12)).norm();
    const double d21 = (to_eigen(p21.apply(*r.w21)) - to_eigen(*r.w21)).norm();
    const double dsum = (to_eigen(*r.w12) + to_eigen(*r.w21) - w).norm();
    out.projector_defect = std::max({d12, d21, dsum});
  } else {
    const FloatLabeled wl = from_eigen(space, w);
    out.projector_defect = (to_eigen(process_projector(r.strategy, copies).apply(wl)) - w).norm();
  }
  out.min_eigenvalue = min_eig;
  out.trace_defect = std::abs(w.trace().real() - gamma);
  return out;
}

}  // namespace qdisc
