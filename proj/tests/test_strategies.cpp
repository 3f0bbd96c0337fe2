#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qdisc/discrimination.hpp"
#include "qdisc/strategies.hpp"
#include "support.hpp"

using namespace qdisc;
using namespace testing_support;

namespace {

const SpaceStructure kSlots{{"I1", 2}, {"O1", 2}, {"I2", 2}, {"O2", 2}};

using Terms = std::vector<std::pair<int, std::vector<std::string>>>;

// Sum of signed trace-and-replace terms, evaluated directly.
ExactLabeled apply_terms(const Terms& terms, const ExactLabeled& w) {
  ExactMatrix out(w.dim(), w.dim());
  for (const auto& [sign, labels] : terms) {
    const ExactMatrix t = labels.empty() ? w.entries : trace_and_replace(w, labels).entries;
    if (sign > 0) out += t;
    else out -= t;
  }
  return ExactLabeled(w.space, out);
}

const Terms kPar{{1, {"O1", "O2"}}};
const Terms kSeq12{{1, {"O2"}}, {-1, {"I2", "O2"}}, {1, {"O1", "I2", "O2"}}};
const Terms kSeq21{{1, {"O1"}}, {-1, {"I1", "O1"}}, {1, {"O2", "I1", "O1"}}};
const Terms kGen{{1, {"I1", "O1", "O2"}}, {-1, {"I1", "O1"}}, {1, {"O1", "I2", "O2"}}, {-1, {"I2", "O2"}},
                 {1, {"O1"}},             {1, {"O2"}},         {-1, {"O1", "O2"}}};
const Terms kParDual{{1, {}}, {-1, {"O1", "O2"}}, {1, {"I1", "I2", "O1", "O2"}}};
const Terms kSeq12Dual{{1, {}}, {-1, {"O2"}}, {1, {"I2", "O2"}}, {-1, {"O1", "I2", "O2"}}, {1, {"I1", "O1", "I2", "O2"}}};
const Terms kGenDual{{1, {}},           {-1, {"O1"}},          {1, {"I1", "O1"}},
                     {-1, {"O2"}},      {1, {"I2", "O2"}},     {-1, {"O1", "I2", "O2"}},
                     {-1, {"I1", "O1", "O2"}}, {1, {"O1", "O2"}}, {1, {"I1", "O1", "I2", "O2"}}};

ExactLabeled random_exact(std::mt19937_64& rng) { return ExactLabeled(kSlots, random_exact_hermitian(16, rng)); }

ExactMatrix scaled_identity(std::size_t n, const Rational& c) { return ExactMatrix::identity(n) * ExactComplex(c); }

const std::vector<Strategy> kAffine{Strategy::Par, Strategy::Seq12, Strategy::Seq21, Strategy::Gen};

FloatLabeled ocb_process() {
  Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity(), z = Eigen::Matrix2cd::Zero(), x = Eigen::Matrix2cd::Zero();
  z(0, 0) = 1;
  z(1, 1) = -1;
  x(0, 1) = x(1, 0) = 1;
  auto k4 = [](const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b, const Eigen::Matrix2cd& c, const Eigen::Matrix2cd& d) {
    return Eigen::kroneckerProduct(Eigen::kroneckerProduct(a, b).eval(), Eigen::kroneckerProduct(c, d).eval()).eval();
  };
  const Eigen::MatrixXcd w = 0.25 * (k4(id, id, id, id) + (k4(id, z, z, id) + k4(z, id, x, z)) / std::sqrt(2.0));
  return FloatLabeled(kSlots, to_dense(w));
}

}  // namespace

TEST_CASE("process projectors match the trace-and-replace tables") {
  std::mt19937_64 rng(1);
  const std::vector<std::pair<Strategy, const Terms*>> table{
      {Strategy::Par, &kPar}, {Strategy::Seq12, &kSeq12}, {Strategy::Seq21, &kSeq21}, {Strategy::Gen, &kGen}};
  for (int k = 0; k < 3; ++k) {
    const ExactLabeled w = random_exact(rng);
    for (const auto& [s, terms] : table) {
      CAPTURE(to_string(s));
      CHECK(process_projector(s).apply(w).entries == apply_terms(*terms, w).entries);
    }
    CHECK(dual_projector(Strategy::Par).apply(w).entries == apply_terms(kParDual, w).entries);
    CHECK(dual_projector(Strategy::Seq12).apply(w).entries == apply_terms(kSeq12Dual, w).entries);
    CHECK(dual_projector(Strategy::Gen).apply(w).entries == apply_terms(kGenDual, w).entries);
  }
  CHECK_THROWS_AS(process_projector(Strategy::Sep), NotAffine);
  CHECK_THROWS_AS(dual_projector(Strategy::Sep), NotAffine);
  CHECK_THROWS_AS(process_projector(Strategy::Seq12, 1), Unsupported);
}

TEST_CASE("projector identities on random exact inputs") {
  std::mt19937_64 rng(2);
  const ExactLabeled one = ExactLabeled::identity(kSlots);
  for (Strategy s : kAffine) {
    CAPTURE(to_string(s));
    for (const ProjectorMap& p : {process_projector(s), dual_projector(s)}) {
      CHECK(p.is_idempotent());
      CHECK(p.apply(one).entries == one.entries);
      const ExactLabeled a = random_exact(rng), b = random_exact(rng);
      const ExactLabeled pa = p.apply(a);
      CHECK(p.apply(pa).entries == pa.entries);
      CHECK(pa.trace() == a.trace());
      CHECK(trace_of_product(b.entries, pa.entries) == trace_of_product(p.apply(b).entries, a.entries));
    }
  }
  const ProjectorMap p1 = process_projector(Strategy::Par, 1);
  CHECK(p1 == ProjectorMap::trace_and_replace({"O1"}));
  CHECK(p1.is_idempotent());
}

TEST_CASE("projector nesting") {
  const ProjectorMap par = process_projector(Strategy::Par), gen = process_projector(Strategy::Gen);
  for (Strategy s : {Strategy::Seq12, Strategy::Seq21}) {
    const ProjectorMap seq = process_projector(s);
    CHECK(gen.compose(seq) == seq);
    CHECK(seq.compose(par) == par);
  }
  CHECK(gen.compose(par) == par);

  std::mt19937_64 rng(3);
  const ExactLabeled w = process_projector(Strategy::Par).apply(random_exact(rng));
  CHECK(process_projector(Strategy::Seq12).apply(w).entries == w.entries);
  CHECK(process_projector(Strategy::Seq21).apply(w).entries == w.entries);
}

TEST_CASE("duality pairing Tr(W Wbar) = 1") {
  std::mt19937_64 rng(4);
  for (Strategy s : kAffine) {
    CAPTURE(to_string(s));
    for (int k = 0; k < 3; ++k) {
      ExactLabeled w = process_projector(s).apply(random_exact(rng));
      ExactLabeled wb = dual_projector(s).apply(random_exact(rng));
      // shift by identity to push the traces away from zero, then normalise
      w.entries += scaled_identity(16, 40);
      wb.entries += scaled_identity(16, 40);
      w.entries *= ExactComplex(Rational(4) / w.trace().re.a());
      wb.entries *= ExactComplex(Rational(4) / wb.trace().re.a());
      CHECK(trace_of_product(w.entries, wb.entries) == ExactComplex(1));
      CHECK(in_dual_space(wb, s));
    }
  }
}

TEST_CASE("normalisation constants") {
  CHECK(process_trace(kSlots) == 4);
  CHECK(dual_trace(kSlots) == 4);
  const SpaceStructure one{{"I1", 2}, {"O1", 2}};
  CHECK(process_trace(one) == 2);
  CHECK(dual_trace(one) == 2);
  const SpaceStructure qutrit = slot_space(2, 3, 3);
  CHECK(process_trace(qutrit) == 9);
  CHECK(dual_trace(qutrit) == 9);
  const SpaceStructure mixed = slot_space(2, 2, 3);
  CHECK(process_trace(mixed) == 9);
  CHECK(dual_trace(mixed) == 4);
  CHECK(copies_of(kSlots) == 2);
}

TEST_CASE("process membership") {
  const FloatLabeled white(kSlots, FloatMatrix::identity(16) * cplx(0.25));
  for (Strategy s : all_strategies()) CHECK(is_valid_process(white, s));
  const ExactLabeled white_exact(kSlots, scaled_identity(16, frac(1, 4)));
  for (Strategy s : kAffine) CHECK(is_valid_process(white_exact, s));
  CHECK_THROWS_AS(is_valid_process(white_exact, Strategy::Sep), Unsupported);

  // rho on I1, a channel O1 -> I2, identity on O2: sequential 1 then 2
  std::mt19937_64 rng(5);
  const FloatLabeled rho(SpaceStructure{{"I1", 2}}, to_dense(random_state(2, rng)));
  const FloatLabeled e = relabel(random_channel(2, 2, rng), {"O1", "I2"});
  const FloatLabeled w = kron(kron(rho, e), FloatLabeled::identity(SpaceStructure{{"O2", 2}}));
  CHECK(is_valid_process(w, Strategy::Seq12));
  CHECK(is_valid_process(w, Strategy::Gen));
  CHECK(is_valid_process(w, Strategy::Sep));
  CHECK(!is_valid_process(w, Strategy::Par));
  CHECK(!is_valid_process(w, Strategy::Seq21));

  const FloatLabeled ocb = ocb_process();
  CHECK(is_valid_process(ocb, Strategy::Gen));
  CHECK(!is_valid_process(ocb, Strategy::Seq12));
  CHECK(!is_valid_process(ocb, Strategy::Seq21));
  const SepMembership m = sep_membership(ocb);
  CHECK(!m.member);
  CHECK(m.t > 1e-3);
  CHECK(!is_valid_process(ocb, Strategy::Sep));

  // an even mixture of the two orders is separable but neither sequential
  const FloatLabeled e2 = relabel(random_channel(2, 2, rng), {"O2", "I1"});
  const FloatLabeled rho2(SpaceStructure{{"I2", 2}}, to_dense(random_state(2, rng)));
  const FloatLabeled w21 = permute_systems(kron(kron(rho2, e2), FloatLabeled::identity(SpaceStructure{{"O1", 2}})),
                                           {"I1", "O1", "I2", "O2"});
  CHECK(is_valid_process(w21, Strategy::Seq21));
  FloatLabeled mixed(kSlots, (w.entries + w21.entries) * cplx(0.5));
  CHECK(is_valid_process(mixed, Strategy::Sep));
  CHECK(!is_valid_process(mixed, Strategy::Seq12));
  CHECK(!is_valid_process(mixed, Strategy::Seq21));
}

TEST_CASE("tester membership") {
  const FloatLabeled white(kSlots, FloatMatrix::identity(16) * cplx(0.25));
  const FloatLabeled half(kSlots, white.entries * cplx(0.5));
  CHECK(is_valid_tester(std::vector<FloatLabeled>{half, half}, Strategy::Par));
  FloatLabeled neg = half;
  neg.entries(0, 0) -= 0.5;
  FloatLabeled pos = half;
  pos.entries(0, 0) += 0.5;
  CHECK(!is_valid_tester(std::vector<FloatLabeled>{neg, pos}, Strategy::Gen));

  const ExactLabeled eh(kSlots, scaled_identity(16, frac(1, 8)));
  CHECK(is_valid_tester(std::vector<ExactLabeled>{eh, eh}, Strategy::Gen));
  ExactLabeled en = eh, ep = eh;
  en.entries(3, 3) = ExactComplex(frac(-1, 8));
  ep.entries(3, 3) = ExactComplex(frac(3, 8));
  CHECK(!is_valid_tester(std::vector<ExactLabeled>{en, ep}, Strategy::Gen));
}
