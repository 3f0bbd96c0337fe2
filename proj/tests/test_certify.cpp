#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qdisc/certificate_json.hpp"
#include "qdisc/certify.hpp"
#include "support.hpp"

using namespace qdisc;
using namespace testing_support;

namespace {

const SpaceStructure kSlots{{"I1", 2}, {"O1", 2}, {"I2", 2}, {"O2", 2}};

Ensemble pair_of(const std::string& specs) {
  return make_ensemble(parse_channel_list(specs), {frac(1, 2), frac(1, 2)}, 2);
}

FloatLabeled white(double c) { return FloatLabeled(kSlots, FloatMatrix::identity(16) * cplx(c)); }

bool has_passed(const Certificate& c, const std::string& check) {
  bool found = false;
  for (const auto& r : c.transcript) {
    if (r.check != check) continue;
    found = true;
    if (!r.passed) return false;
  }
  return found;
}

Certificate with_witness_entry(Certificate c, const std::string& name, std::size_t i, std::size_t j,
                               const ExactComplex& delta) {
  for (auto& w : c.witnesses) {
    if (w.name != name) continue;
    w.matrix.entries(i, j) += delta;
    if (i != j) w.matrix.entries(j, i) += conj(delta);
  }
  return c;
}

const Rational kTiny = Rational(1, mpz_class("1000000000000000000000000000000"));

}  // namespace

TEST_CASE("rationalize_to_subspace") {
  const ProjectorMap p = process_projector(Strategy::Gen);
  // already exact, in the subspace, right trace
  const ExactLabeled w = rationalize_to_subspace(white(0.25), p, 4);
  CHECK(w.entries == ExactMatrix::identity(16) * ExactComplex(frac(1, 4)));

  std::mt19937_64 rng(3);
  const FloatLabeled noisy(kSlots, to_dense(random_hermitian(16, rng) + 4.0 * Eigen::MatrixXcd::Identity(16, 16)));
  for (Strategy s : {Strategy::Par, Strategy::Seq12, Strategy::Gen}) {
    const ProjectorMap q = process_projector(s);
    const ExactLabeled out = rationalize_to_subspace(noisy, q, 4);
    CHECK(is_hermitian(out.entries));
    CHECK(q.apply(out).entries == out.entries);
    CHECK(out.trace() == ExactComplex(4));
  }
}

TEST_CASE("depolarisation commutes with projected operators") {
  std::mt19937_64 rng(4);
  for (Strategy s : {Strategy::Par, Strategy::Seq21, Strategy::Gen}) {
    const ExactLabeled c(kSlots, random_exact_hermitian(16, rng));
    for (const ProjectorMap& p : {process_projector(s), dual_projector(s)}) {
      CAPTURE(to_string(s));
      CAPTURE(p.to_string());
      const Rational eta = frac(static_cast<long>(rng() % 1000), 1000);
      const ExactLabeled pc = p.apply(c);
      const ExactLabeled d(kSlots, depolarize(eta, pc.entries));
      CHECK(p.apply(d).entries == d.entries);
    }
  }
}

TEST_CASE("white-noise testers on identical channels") {
  const Ensemble e = pair_of("ad:0.3,ad:0.3");
  const std::vector<FloatLabeled> tester{white(0.125), white(0.125)};
  for (Strategy s : {Strategy::Par, Strategy::Seq12, Strategy::Gen}) {
    const Certificate c = certify_lower(tester, e, s);
    CHECK(c.bound == RadicalSum(frac(1, 2)));
    CHECK(c.eta == 1);
    CHECK(verify(c));
  }
  const Certificate sep = certify_sep_lower(tester, white(0.125), white(0.125), e);
  CHECK(sep.bound == RadicalSum(frac(1, 2)));
  CHECK(sep.eta == 1);
  CHECK(verify(sep));

  for (Strategy s : {Strategy::Par, Strategy::Sep, Strategy::Gen}) {
    const DiscriminationResult r = discriminate(e, s);
    const Certificate up = certify(r, e, Direction::Upper);
    CHECK(up.bound.to_double() >= 0.5);
    CHECK(up.bound.to_double() <= 0.5 + 1e-5);
    CHECK(verify(up));
  }
}

TEST_CASE("certified brackets enclose the float optimum") {
  const Ensemble e = pair_of("ad:0.2,bf:0.6");
  for (Strategy s : all_strategies()) {
    CAPTURE(to_string(s));
    const DiscriminationResult r = discriminate(e, s);
    const Certificate lo = certify(r, e, Direction::Lower);
    const Certificate up = certify(r, e, Direction::Upper);
    CHECK(lo.bound.to_double() <= r.value + 1e-6);
    CHECK(up.bound.to_double() >= r.value - 1e-6);
    CHECK(up.bound.to_double() - lo.bound.to_double() < 1e-5);
    CHECK(!(up.bound < lo.bound));
    CHECK(verify(lo));
    CHECK(verify(up));
    CHECK(has_passed(lo, "commutation"));
    CHECK(has_passed(up, "commutation"));
    CHECK(has_passed(lo, "psd"));
    CHECK(has_passed(up, "psd"));
    CHECK(run_checks(lo, Execution::Serial) == run_checks(lo, Execution::Parallel));
    if (s != Strategy::Sep) {
      std::vector<ExactLabeled> t;
      for (const auto& w : lo.witnesses) t.push_back(w.matrix);
      CHECK(is_valid_tester(t, s));
      CHECK(in_dual_space(up.witness("Wbar"), s));
    }
  }
}

TEST_CASE("certificates survive JSON and reject tampering") {
  const Ensemble e = pair_of("ad:0.67,bf:0.87");
  const DiscriminationResult r = discriminate(e, Strategy::Gen);
  const Certificate lo = certify(r, e, Direction::Lower);
  const Certificate up = certify(r, e, Direction::Upper);
  for (const Certificate* c : {&lo, &up}) {
    const Certificate back = certificate_from_json(nlohmann::json::parse(certificate_to_json(*c).dump()));
    CHECK(verify(back));
    CHECK(back.bound == c->bound);
    CHECK(back.eta == c->eta);
    CHECK(back.witnesses.size() == c->witnesses.size());
    CHECK(back.witnesses[0].matrix.entries == c->witnesses[0].matrix.entries);
    CHECK(back.chois[0].entries == c->chois[0].entries);
  }
  CHECK(certificate_to_json(lo)["meta"]["radicand_d"] == nlohmann::json::array({33}));
  CHECK(certificate_to_json(up)["bound"].is_string());
  CHECK(certificate_to_json(lo)["bound"].contains("radical_sum"));

  // off-diagonal nudge leaves the GEN span, diagonal nudge breaks the trace
  CHECK(!verify(with_witness_entry(lo, "T1", 0, 5, ExactComplex(kTiny))));
  CHECK(!verify(with_witness_entry(up, "Wbar", 0, 0, ExactComplex(kTiny))));

  Certificate bumped = lo;
  bumped.bound = lo.bound + RadicalSum(kTiny);
  CHECK(!verify(bumped));
  // an upper certificate stays valid a little below its bound, but not at the lower bound
  Certificate undercut = up;
  undercut.bound = lo.bound.enclosure(64).first;
  CHECK(!verify(undercut));
  Certificate relabelled = lo;
  relabelled.transcript.front().subject = "something else";
  CHECK(!verify(relabelled));
  Certificate truncated = lo;
  truncated.transcript.pop_back();
  CHECK(!verify(truncated));
}

TEST_CASE("hopeless dual witnesses fail certification") {
  const Ensemble e = pair_of("ad:0.67,bf:0.87");
  DiscriminationResult r = discriminate(e, Strategy::Par);
  r.dual.lambda = 0.5;
  CHECK_THROWS_AS(certify(r, e, Direction::Upper), CertificationFailed);

  const Ensemble floaty = make_ensemble(std::vector<FloatLabeled>{random_channel(2, 2, 1), random_channel(2, 2, 2)},
                                        {frac(1, 2), frac(1, 2)}, 2);
  CHECK_THROWS(certify(discriminate(floaty, Strategy::Par), floaty, Direction::Lower));
}

TEST_CASE("hierarchy helpers") {
  const Ensemble e = pair_of("ad:0.67,bf:0.87");
  const auto done = certify_strategies(e, {Strategy::Par, Strategy::Gen});
  const auto levels = hierarchy_levels(done);
  REQUIRE(levels.size() == 2);
  CHECK(levels[0].name == "par");
  CHECK(levels[1].name == "gen");
  CHECK(strict_hierarchy(levels));
  CHECK(!strict_hierarchy({levels[1], levels[0]}));
  CHECK(!strict_hierarchy({levels[0]}));
  CHECK(parse_direction("upper") == Direction::Upper);
  CHECK_THROWS(parse_direction("sideways"));
}
