#include "qdisc/sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace qdisc {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

Eigen::Index svec_dim(Eigen::Index n) { return n * n; }

Eigen::MatrixXcd sym(const Eigen::MatrixXcd& g) { return (g + g.adjoint()) * 0.5; }

double inner(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  // Re Tr(A B) for Hermitian A, B.
  return (a.array() * b.transpose().array()).sum().real();
}

// Largest alpha with X + alpha dX >= 0 (infinity when dX >= 0 relative to X).
double max_step(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& dx, bool& ok) {
  Eigen::LLT<Eigen::MatrixXcd> llt(x);
  if (llt.info() != Eigen::Success) {
    ok = false;
    return 0.0;
  }
  const auto l = llt.matrixL();
  Eigen::MatrixXcd w = l.solve(dx);
  w = l.solve(w.adjoint().eval()).adjoint().eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sym(w), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

struct Workspace {
  const SdpProblem& p;
  std::vector<std::vector<Eigen::MatrixXcd>> row_mats;  // smat of every constraint row, per block

  explicit Workspace(const SdpProblem& prob) : p(prob) {
    row_mats.resize(p.num_blocks());
    for (std::size_t b = 0; b < p.num_blocks(); ++b) {
      const auto& c = p.constraints[b];
      row_mats[b].reserve(c.rows.size());
      for (Eigen::Index r = 0; r < c.coeffs.rows(); ++r) {
        row_mats[b].push_back(smat(c.coeffs.row(r).transpose(), p.block_dims[b]));
      }
    }
  }

  // Pseudo-inverse of A A^T, for pulling X back onto A(X) = b.
  Eigen::MatrixXd gram_pinv() const {
    const Eigen::Index m = p.num_rows();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t b = 0; b < p.num_blocks(); ++b) {
      const auto& c = p.constraints[b];
      const Eigen::MatrixXd local = c.coeffs * c.coeffs.transpose();
      for (std::size_t i = 0; i < c.rows.size(); ++i)
        for (std::size_t j = 0; j < c.rows.size(); ++j)
          g(c.rows[i], c.rows[j]) += local(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    const double cut = 1e-10 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    Eigen::VectorXd inv = es.eigenvalues();
    for (Eigen::Index k = 0; k < inv.size(); ++k) inv(k) = std::abs(inv(k)) > cut ? 1.0 / inv(k) : 0.0;
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  }

  Eigen::VectorXd apply_a(const std::vector<Eigen::MatrixXcd>& x) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(p.num_rows());
    for (std::size_t b = 0; b < p.num_blocks(); ++b) {
      const auto& c = p.constraints[b];
      if (c.rows.empty()) continue;
      const Eigen::VectorXd local = c.coeffs * svec(x[b]);
      for (std::size_t r = 0; r < c.rows.size(); ++r) out(c.rows[r]) += local(static_cast<Eigen::Index>(r));
    }
    return out;
  }

  Eigen::MatrixXcd apply_at(const Eigen::VectorXd& y, std::size_t b) const {
    const auto& c = p.constraints[b];
    const Eigen::Index n = p.block_dims[b];
    if (c.rows.empty()) return Eigen::MatrixXcd::Zero(n, n);
    Eigen::VectorXd local(static_cast<Eigen::Index>(c.rows.size()));
    for (std::size_t r = 0; r < c.rows.size(); ++r) local(static_cast<Eigen::Index>(r)) = y(c.rows[r]);
    return smat(c.coeffs.transpose() * local, n);
  }

  // M_ij = Re Tr(A_i X A_j Z^-1) = Re <L^-1 A_i R, L^-1 A_j R> with X = R R^H and
  // Z = L L^H. The Gram form keeps M positive semidefinite in floating point.
  Eigen::MatrixXd schur(const std::vector<Eigen::MatrixXcd>& xfac, const std::vector<Eigen::MatrixXcd>& zfac) const {
    const Eigen::Index m = p.num_rows();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t b = 0; b < p.num_blocks(); ++b) {
      const auto& c = p.constraints[b];
      const auto k = static_cast<Eigen::Index>(c.rows.size());
      if (k == 0) continue;
      const Eigen::Index n = p.block_dims[b];
      Eigen::MatrixXcd v(n * n, k);
      for (Eigen::Index r = 0; r < k; ++r) {
        Eigen::MatrixXcd g = row_mats[b][static_cast<std::size_t>(r)] * xfac[b];
        zfac[b].triangularView<Eigen::Lower>().solveInPlace(g);
        v.col(r) = Eigen::Map<const Eigen::VectorXcd>(g.data(), n * n);
      }
      Eigen::MatrixXd local(k, k);
      local.noalias() = (v.adjoint() * v).real();
      for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) out(c.rows[i], c.rows[j]) += local(i, j);
    }
    return (out + out.transpose()) * 0.5;
  }
};

struct Iterate {
  std::vector<Eigen::MatrixXcd> x;
  std::vector<Eigen::MatrixXcd> z;
  Eigen::VectorXd y;
};

struct Measures {
  double pobj = 0, dobj = 0, gap = 0, rp = 0, rd = 0;
  double merit() const { return std::max({gap, rp, rd}); }
};

}  // namespace

Eigen::VectorXd svec(const Eigen::MatrixXcd& h) {
  const Eigen::Index n = h.rows();
  Eigen::VectorXd v(svec_dim(n));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) v(k++) = h(i, i).real();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      v(k++) = kSqrt2 * h(i, j).real();
      v(k++) = kSqrt2 * h(i, j).imag();
    }
  return v;
}

Eigen::MatrixXcd smat(const Eigen::Ref<const Eigen::VectorXd>& v, Eigen::Index n) {
  if (v.size() != svec_dim(n)) throw std::invalid_argument("smat: size mismatch");
  Eigen::MatrixXcd h(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) h(i, i) = v(k++);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const std::complex<double> z(v(k) / kSqrt2, v(k + 1) / kSqrt2);
      k += 2;
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  return h;
}

std::size_t SdpProblem::add_block(Eigen::Index n, std::string name, Eigen::MatrixXcd c) {
  if (c.rows() != n || c.cols() != n) throw std::invalid_argument("SdpProblem: objective block shape mismatch");
  block_dims.push_back(n);
  block_names.push_back(std::move(name));
  objective.push_back(std::move(c));
  constraints.push_back(SdpBlockRows{{}, Eigen::MatrixXd(0, svec_dim(n))});
  return block_dims.size() - 1;
}

Eigen::Index SdpProblem::add_rows(const Eigen::VectorXd& values) {
  const Eigen::Index first = rhs.size();
  Eigen::VectorXd grown(first + values.size());
  grown << rhs, values;
  rhs = std::move(grown);
  return first;
}

void SdpProblem::set_rows(std::size_t block, std::vector<Eigen::Index> rows, Eigen::MatrixXd coeffs) {
  if (block >= num_blocks()) throw std::invalid_argument("SdpProblem: unknown block");
  auto& c = constraints[block];
  if (coeffs.rows() != static_cast<Eigen::Index>(rows.size()) || coeffs.cols() != svec_dim(block_dims[block])) {
    throw std::invalid_argument("SdpProblem: constraint coefficient shape mismatch");
  }
  const Eigen::Index old = c.coeffs.rows();
  Eigen::MatrixXd merged(old + coeffs.rows(), coeffs.cols());
  merged << c.coeffs, coeffs;
  c.coeffs = std::move(merged);
  c.rows.insert(c.rows.end(), rows.begin(), rows.end());
}

void SdpProblem::validate() const {
  if (block_names.size() != num_blocks() || objective.size() != num_blocks() || constraints.size() != num_blocks()) {
    throw std::invalid_argument("SdpProblem: inconsistent block lists");
  }
  std::vector<bool> used(static_cast<std::size_t>(num_rows()), false);
  for (std::size_t b = 0; b < num_blocks(); ++b) {
    if (!objective[b].isApprox(objective[b].adjoint(), 1e-12) && objective[b].norm() > 0) {
      throw std::invalid_argument("SdpProblem: objective block '" + block_names[b] + "' is not Hermitian");
    }
    for (Eigen::Index r : constraints[b].rows) {
      if (r < 0 || r >= num_rows()) throw std::invalid_argument("SdpProblem: row index out of range");
      used[static_cast<std::size_t>(r)] = true;
    }
  }
  if (std::find(used.begin(), used.end(), false) != used.end()) {
    throw std::invalid_argument("SdpProblem: a constraint row touches no block");
  }
}

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal:
      return "optimal";
    case SdpStatus::MaxIter:
      return "max_iter";
    case SdpStatus::NumericalFailure:
      return "numerical_failure";
  }
  return "?";
}

SdpSolution InteriorPointSolver::solve(const SdpProblem& p, const SdpOptions& opt) const {
  p.validate();
  const Workspace ws(p);
  const std::size_t nb = p.num_blocks();
  const Eigen::Index m = p.num_rows();
  const Eigen::MatrixXd gram_pinv = m > 0 ? ws.gram_pinv() : Eigen::MatrixXd();

  double total_dim = 0;
  for (auto n : p.block_dims) total_dim += static_cast<double>(n);

  // Starting point scaled to the data.
  Eigen::VectorXd row_norm = Eigen::VectorXd::Zero(m);
  for (std::size_t b = 0; b < nb; ++b) {
    const auto& c = p.constraints[b];
    for (std::size_t r = 0; r < c.rows.size(); ++r) {
      row_norm(c.rows[r]) += c.coeffs.row(static_cast<Eigen::Index>(r)).squaredNorm();
    }
  }
  row_norm = row_norm.cwiseSqrt();
  double xi = 10.0, zeta = 10.0;
  for (Eigen::Index r = 0; r < m; ++r) {
    xi = std::max(xi, (1.0 + std::abs(p.rhs(r))) / (1.0 + row_norm(r)) * std::sqrt(total_dim));
    zeta = std::max(zeta, row_norm(r));
  }
  for (std::size_t b = 0; b < nb; ++b) {
    xi = std::max(xi, std::sqrt(static_cast<double>(p.block_dims[b])));
    zeta = std::max(zeta, p.objective[b].norm());
  }

  Iterate it;
  it.y = Eigen::VectorXd::Zero(m);
  for (std::size_t b = 0; b < nb; ++b) {
    const Eigen::Index n = p.block_dims[b];
    it.x.push_back(Eigen::MatrixXcd::Identity(n, n) * xi);
    it.z.push_back(Eigen::MatrixXcd::Identity(n, n) * zeta);
  }

  auto measure = [&](const Iterate& s) {
    Measures r;
    r.pobj = p.objective_offset;
    for (std::size_t b = 0; b < nb; ++b) r.pobj += inner(p.objective[b], s.x[b]);
    r.dobj = p.rhs.dot(s.y) + p.objective_offset;
    r.gap = std::abs(r.dobj - r.pobj);
    r.rp = m > 0 ? (p.rhs - ws.apply_a(s.x)).cwiseAbs().maxCoeff() : 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      r.rd = std::max(r.rd, (ws.apply_at(s.y, b) - p.objective[b] - s.z[b]).cwiseAbs().maxCoeff());
    }
    return r;
  };

  SdpSolution sol;
  Iterate best = it;
  Measures best_m = measure(it);
  sol.status = SdpStatus::MaxIter;
  int stall = 0;

  for (int iter = 0; iter < opt.max_iter; ++iter) {
    sol.iterations = iter;
    const Measures cur = measure(it);
    if (cur.merit() < best_m.merit()) {
      best = it;
      best_m = cur;
      stall = 0;
    } else if (++stall > 8) {
      break;
    }
    if (opt.verbose) {
      std::fprintf(stderr, "iter %3d  pobj % .12e  dobj % .12e  gap %.2e  rp %.2e  rd %.2e\n", iter, cur.pobj,
                   cur.dobj, cur.gap, cur.rp, cur.rd);
    }
    if (cur.gap <= opt.tol && cur.rp <= opt.tol && cur.rd <= opt.tol) {
      sol.status = SdpStatus::Optimal;
      break;
    }

    double mu = 0;
    for (std::size_t b = 0; b < nb; ++b) mu += inner(it.x[b], it.z[b]);
    mu /= total_dim;

    std::vector<Eigen::MatrixXcd> zinv(nb), rd(nb), xfac(nb), zfac(nb);
    bool ok = true;
    for (std::size_t b = 0; b < nb; ++b) {
      Eigen::LLT<Eigen::MatrixXcd> zl(it.z[b]);
      Eigen::LLT<Eigen::MatrixXcd> xl(it.x[b]);
      if (zl.info() != Eigen::Success || xl.info() != Eigen::Success) {
        ok = false;
        break;
      }
      zfac[b] = zl.matrixL();
      xfac[b] = xl.matrixL();
      zinv[b] = sym(zl.solve(Eigen::MatrixXcd::Identity(p.block_dims[b], p.block_dims[b])));
      rd[b] = p.objective[b] - ws.apply_at(it.y, b) + it.z[b];
    }
    if (!ok) {
      sol.status = SdpStatus::NumericalFailure;
      break;
    }
    const Eigen::VectorXd rp = p.rhs - ws.apply_a(it.x);

    Eigen::MatrixXd schur = ws.schur(xfac, zfac);
    Eigen::LLT<Eigen::MatrixXd> chol(schur);
    if (chol.info() != Eigen::Success) {
      const double shift = 1e-14 * std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff());
      schur.diagonal().array() += shift;
      chol.compute(schur);
      if (chol.info() != Eigen::Success) {
        sol.status = SdpStatus::NumericalFailure;
        break;
      }
    }

    auto direction = [&](double sigma_mu, const std::vector<Eigen::MatrixXcd>* corr, std::vector<Eigen::MatrixXcd>& dx,
                         std::vector<Eigen::MatrixXcd>& dz, Eigen::VectorXd& dy) {
      std::vector<Eigen::MatrixXcd> base(nb);
      for (std::size_t b = 0; b < nb; ++b) {
        base[b] = sigma_mu * zinv[b] - it.x[b] + sym(it.x[b] * rd[b] * zinv[b]);
        if (corr) base[b] -= (*corr)[b];
      }
      const Eigen::VectorXd rhs = ws.apply_a(base) - rp;
      dy = chol.solve(rhs);
      dx.resize(nb);
      dz.resize(nb);
      auto expand = [&] {
        for (std::size_t b = 0; b < nb; ++b) {
          dz[b] = sym(ws.apply_at(dy, b) - rd[b]);
          dx[b] = sigma_mu * zinv[b] - it.x[b] - sym(it.x[b] * dz[b] * zinv[b]);
          if (corr) dx[b] -= (*corr)[b];
          dx[b] = sym(dx[b]);
        }
      };
      expand();
      // Iterative refinement against the operator itself: A(dX) = rp is what
      // the step must satisfy, and M is ill-conditioned near the optimum.
      // A round that makes the defect worse is undone.
      double defect_norm = (ws.apply_a(dx) - rp).cwiseAbs().maxCoeff();
      for (int round = 0; round < 3; ++round) {
        if (defect_norm <= 1e-15 * (1.0 + rp.cwiseAbs().maxCoeff())) break;
        const Eigen::VectorXd prev = dy;
        dy += chol.solve(ws.apply_a(dx) - rp);
        expand();
        const double next = (ws.apply_a(dx) - rp).cwiseAbs().maxCoeff();
        if (next >= defect_norm) {
          dy = prev;
          expand();
          break;
        }
        defect_norm = next;
      }
    };

    auto step_lengths = [&](const std::vector<Eigen::MatrixXcd>& dx, const std::vector<Eigen::MatrixXcd>& dz,
                            double& ap, double& ad) {
      ap = std::numeric_limits<double>::infinity();
      ad = std::numeric_limits<double>::infinity();
      bool good = true;
      for (std::size_t b = 0; b < nb; ++b) {
        ap = std::min(ap, max_step(it.x[b], dx[b], good));
        ad = std::min(ad, max_step(it.z[b], dz[b], good));
      }
      return good;
    };

    std::vector<Eigen::MatrixXcd> dxa, dza;
    Eigen::VectorXd dya;
    direction(0.0, nullptr, dxa, dza, dya);
    double apa = 0, ada = 0;
    if (!step_lengths(dxa, dza, apa, ada)) {
      sol.status = SdpStatus::NumericalFailure;
      break;
    }
    apa = std::min(1.0, apa);
    ada = std::min(1.0, ada);
    double mu_aff = 0;
    for (std::size_t b = 0; b < nb; ++b) mu_aff += inner(it.x[b] + apa * dxa[b], it.z[b] + ada * dza[b]);
    mu_aff /= total_dim;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    std::vector<Eigen::MatrixXcd> corr(nb);
    for (std::size_t b = 0; b < nb; ++b) corr[b] = sym(dxa[b] * dza[b] * zinv[b]);
    std::vector<Eigen::MatrixXcd> dx, dz;
    Eigen::VectorXd dy;
    direction(sigma * mu, &corr, dx, dz, dy);
    double ap = 0, ad = 0;
    if (!step_lengths(dx, dz, ap, ad)) {
      sol.status = SdpStatus::NumericalFailure;
      break;
    }
    const double tau = 0.9 + 0.09 * std::min(apa, ada);
    ap = std::min(1.0, tau * ap);
    ad = std::min(1.0, tau * ad);

    for (std::size_t b = 0; b < nb; ++b) {
      it.x[b] = sym(it.x[b] + ap * dx[b]);
      it.z[b] = sym(it.z[b] + ad * dz[b]);
    }
    it.y += ad * dy;

    // Near the optimum the Schur solve leaves A(dX) off by more than the
    // tolerance; undo the accumulated drift with a least-norm correction,
    // shortened if needed to keep X positive definite.
    if (m > 0) {
      const Eigen::VectorXd w = gram_pinv * (p.rhs - ws.apply_a(it.x));
      std::vector<Eigen::MatrixXcd> corr_x(nb);
      double alpha = 1.0;
      bool good = true;
      for (std::size_t b = 0; b < nb; ++b) {
        corr_x[b] = sym(ws.apply_at(w, b));
        alpha = std::min(alpha, 0.9 * max_step(it.x[b], corr_x[b], good));
      }
      if (good && alpha > 0)
        for (std::size_t b = 0; b < nb; ++b) it.x[b] = sym(it.x[b] + alpha * corr_x[b]);
    }
  }

  const Measures last = measure(it);
  if (last.merit() <= best_m.merit()) {
    best = it;
    best_m = last;
  }
  if (best_m.gap <= opt.tol && best_m.rp <= opt.tol && best_m.rd <= opt.tol) sol.status = SdpStatus::Optimal;
  sol.x = std::move(best.x);
  sol.z = std::move(best.z);
  sol.y = std::move(best.y);
  sol.primal_objective = best_m.pobj;
  sol.dual_objective = best_m.dobj;
  sol.gap = best_m.gap;
  sol.primal_residual = best_m.rp;
  sol.dual_residual = best_m.rd;
  return sol;
}

SdpSolution solve(const SdpProblem& p, const SdpOptions& opt) { return InteriorPointSolver().solve(p, opt); }

SubspaceBasis split_subspace(const Eigen::MatrixXd& projector_svec) {
  const Eigen::MatrixXd s = (projector_svec + projector_svec.transpose()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  std::vector<Eigen::Index> in_range, in_complement;
  for (Eigen::Index k = 0; k < s.rows(); ++k) {
    const double ev = es.eigenvalues()(k);
    if (std::abs(ev - 1.0) < 1e-6) {
      in_range.push_back(k);
    } else if (std::abs(ev) < 1e-6) {
      in_complement.push_back(k);
    } else {
      throw std::invalid_argument("split_subspace: map is not an orthogonal projector");
    }
  }
  SubspaceBasis out;
  out.range.resize(s.rows(), static_cast<Eigen::Index>(in_range.size()));
  out.complement.resize(s.rows(), static_cast<Eigen::Index>(in_complement.size()));
  for (std::size_t k = 0; k < in_range.size(); ++k)
    out.range.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(in_range[k]);
  for (std::size_t k = 0; k < in_complement.size(); ++k)
    out.complement.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(in_complement[k]);
  return out;
}

}  // namespace qdisc
