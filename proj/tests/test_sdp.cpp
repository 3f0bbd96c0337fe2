#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "qdisc/discrimination.hpp"
#include "support.hpp"

using namespace qdisc;
using namespace testing_support;

namespace {

Ensemble pair_of(const std::string& specs, int copies = 2, Rational p = frac(1, 2)) {
  return make_ensemble(parse_channel_list(specs), {p, 1 - p}, copies);
}

Ensemble random_pair(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const FloatLabeled a = random_channel(2, 2, rng), b = random_channel(2, 2, rng);
  return make_ensemble(std::vector<FloatLabeled>{a, b}, {frac(1, 2), frac(1, 2)}, 2);
}

// Helstrom: (1 + |p rho - (1-p) sigma|_1) / 2
double helstrom(double p, const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
  return 0.5 * (1 + trace_norm(p * rho - (1 - p) * sigma));
}

}  // namespace

TEST_CASE("svec inner product and round trip") {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXcd a = random_hermitian(5, rng), b = random_hermitian(5, rng);
  CHECK(std::abs(svec(a).dot(svec(b)) - (a * b).trace().real()) < 1e-12);
  CHECK((smat(svec(a), 5) - a).norm() < 1e-14);
  CHECK(svec(a).size() == 25);
}

TEST_CASE("toy SDPs with closed forms") {
  SdpProblem lp;
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(2, 2);
  c(0, 0) = 1;
  c(1, 1) = 2;
  const std::size_t blk = lp.add_block(2, "X", c);
  const Eigen::Index row = lp.add_rows(Eigen::VectorXd::Constant(1, 1.0));
  lp.set_rows(blk, {row}, svec(Eigen::MatrixXcd::Identity(2, 2)).transpose());
  SdpOptions o;
  o.tol = 1e-11;
  const SdpSolution s = solve(lp, o);
  CHECK(s.status == SdpStatus::Optimal);
  CHECK(std::abs(s.primal_objective - 2) < 1e-10);
  CHECK(std::abs(s.dual_objective - 2) < 1e-10);

  // max Re Tr(C X) over density matrices = largest eigenvalue of C
  SdpProblem eig;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2, 2);
  h(0, 1) = cplx(0, 1);
  h(1, 0) = cplx(0, -1);
  h(0, 0) = 0.5;
  const std::size_t b2 = eig.add_block(2, "rho", h);
  eig.set_rows(b2, {eig.add_rows(Eigen::VectorXd::Constant(1, 1.0))}, svec(Eigen::MatrixXcd::Identity(2, 2)).transpose());
  const SdpSolution s2 = solve(eig, o);
  CHECK(std::abs(s2.primal_objective - (0.25 + std::sqrt(0.0625 + 1))) < 1e-10);

  SdpProblem bad;
  Eigen::MatrixXcd nh = Eigen::MatrixXcd::Zero(2, 2);
  nh(0, 1) = 1;
  bad.add_block(2, "X", nh);
  bad.add_rows(Eigen::VectorXd::Constant(1, 1.0));
  bad.set_rows(0, {0}, svec(Eigen::MatrixXcd::Identity(2, 2)).transpose());
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("problem shapes") {
  const Ensemble e = pair_of("ad:0.67,bf:0.87");
  const SdpProblem gen = build_primal(e, Strategy::Gen);
  CHECK(gen.num_blocks() == 2);
  CHECK(gen.block_dims[0] == 16);
  CHECK(build_primal(e, Strategy::Sep).num_blocks() == 4);
  CHECK(build_dual(e, Strategy::Par).num_blocks() == 2);
  CHECK(build_dual(e, Strategy::Sep).num_blocks() == 4);
  const Ensemble one = pair_of("ad:0.67,bf:0.87", 1);
  CHECK_THROWS_AS(build_primal(one, Strategy::Gen), Unsupported);
}

TEST_CASE("Helstrom instances") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    const Eigen::MatrixXcd rho = random_state(2, rng), sigma = random_state(2, rng);
    const Rational p(1 + static_cast<long>(rng() % 9), 10);
    const Ensemble e = make_ensemble(
        std::vector<FloatLabeled>{preparation_channel(to_dense(rho)), preparation_channel(to_dense(sigma))}, {p, 1 - p}, 1);
    const DiscriminationResult r = discriminate(e, Strategy::Par);
    CHECK(r.status == SdpStatus::Optimal);
    CHECK(std::abs(r.value - helstrom(p.get_d(), rho, sigma)) < 1e-8);
  }
}

TEST_CASE("trivial ensembles") {
  for (Strategy s : all_strategies()) {
    CAPTURE(to_string(s));
    CHECK(std::abs(discriminate(pair_of("ad:0.3,ad:0.3"), s).value - 0.5) < 1e-8);
    CHECK(std::abs(discriminate(pair_of("bf:0.3,bf:0.3", 2, frac(3, 10)), s).value - 0.7) < 1e-8);
    // identity vs X conjugation
    CHECK(std::abs(discriminate(pair_of("id,bf:0"), s).value - 1.0) < 1e-8);
    const Ensemble single = make_ensemble(parse_channel_list("ad:0.4"), {Rational(1)}, 2);
    CHECK(std::abs(discriminate(single, s).value - 1.0) < 1e-8);
  }
}

TEST_CASE("Pauli channels against the Bell-diagonal reduction") {
  // Pauli channels are diagonal in the Bell basis, so discriminating them with
  // a maximally entangled probe reduces to two classical distributions:
  // P = (1 + |p q1 - (1-p) q2|_1) / 2 on the Pauli weights (and their squares
  // for two copies). Identity vs "keep with probability 0.87".
  const double one_copy = 0.5 * (1 + 0.5 * 0.26);
  const double two_copy = 0.5 * (1 + 0.5 * 2 * (1 - 0.87 * 0.87));
  CHECK(std::abs(discriminate(pair_of("id,bf:0.87", 1), Strategy::Par).value - one_copy) < 1e-8);
  CHECK(std::abs(discriminate(pair_of("id,bf:0.87"), Strategy::Par).value - two_copy) < 1e-8);
}

TEST_CASE("reference brackets for the amplitude-damping / bit-flip pair") {
  const Ensemble e = pair_of("ad:0.67,bf:0.87");
  DiscriminationOptions dual;
  dual.formulation = Formulation::Dual;
  const DiscriminationResult gen = discriminate(e, Strategy::Gen, dual);
  CHECK(gen.status == SdpStatus::Optimal);
  CHECK(gen.value > 0.8514);
  CHECK(gen.value < 0.8515);
  const DiscriminationResult par = discriminate(e, Strategy::Par);
  CHECK(par.value > 0.8346);
  CHECK(par.value < 0.8347);
}

TEST_CASE("duality, monotonicity and witness residuals on random ensembles") {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    CAPTURE(seed);
    const Ensemble e = random_pair(seed);
    std::vector<double> values;
    for (Strategy s : {Strategy::Par, Strategy::Seq12, Strategy::Sep, Strategy::Gen}) {
      CAPTURE(to_string(s));
      DiscriminationOptions opt;
      opt.cross_check = true;
      const DiscriminationResult r = discriminate(e, s, opt);
      CHECK(r.status == SdpStatus::Optimal);
      CHECK(r.gap <= 1e-9);
      REQUIRE(r.cross_check_value.has_value());
      CHECK(std::abs(*r.cross_check_value - r.value) < 1e-8);
      CHECK(r.primal_value <= r.dual_value + 1e-9);
      const WitnessResiduals w = witness_residuals(r);
      CHECK(w.projector_defect <= 1e-8);
      CHECK(w.min_eigenvalue >= -1e-8);
      CHECK(w.trace_defect <= 1e-8);
      values.push_back(r.value);
    }
    for (std::size_t k = 0; k + 1 < values.size(); ++k) CHECK(values[k] <= values[k + 1] + 2e-9);
  }
}

TEST_CASE("primal and dual formulations agree") {
  const Ensemble e = random_pair(21);
  for (Strategy s : all_strategies()) {
    CAPTURE(to_string(s));
    DiscriminationOptions p, d;
    p.formulation = Formulation::Primal;
    d.formulation = Formulation::Dual;
    const DiscriminationResult rp = discriminate(e, s, p), rd = discriminate(e, s, d);
    CHECK(rp.solved == Formulation::Primal);
    CHECK(rd.solved == Formulation::Dual);
    CHECK(std::abs(rp.value - rd.value) < 1e-8);
  }
}

TEST_CASE("solver is deterministic") {
  const Ensemble e = random_pair(31);
  const DiscriminationResult a = discriminate(e, Strategy::Gen), b = discriminate(e, Strategy::Gen);
  CHECK(std::memcmp(&a.value, &b.value, sizeof(double)) == 0);
  CHECK(max_abs_diff(a.tester[0].entries, b.tester[0].entries) == 0);
  CHECK(max_abs_diff(a.dual.wbar.entries, b.dual.wbar.entries) == 0);
}
