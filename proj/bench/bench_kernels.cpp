// Serial reference vs OpenMP for the kernels that parallelise: batched exact
// PSD tests, the shared-eta bisection, certificate re-checking and the census.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "qdisc/certify.hpp"
#include "qdisc/experiments.hpp"

using namespace qdisc;

namespace {

Execution exec_of(const benchmark::State& s) { return s.range(0) == 0 ? Execution::Serial : Execution::Parallel; }

Rational draw(std::mt19937_64& rng) {
  Rational q(static_cast<long>(rng() % 19) - 9, static_cast<long>(1 + rng() % 7));
  q.canonicalize();
  return q;
}

// Hermitian 16x16 exact matrices shifted to be positive definite.
std::vector<ExactMatrix> psd_batch(std::size_t count) {
  std::mt19937_64 rng(1);
  std::vector<ExactMatrix> out;
  for (std::size_t k = 0; k < count; ++k) {
    ExactMatrix m(16, 16);
    for (std::size_t i = 0; i < 16; ++i) {
      m(i, i) = ExactComplex(draw(rng) + 60);
      for (std::size_t j = i + 1; j < 16; ++j) {
        m(i, j) = ExactComplex(draw(rng), draw(rng));
        m(j, i) = conj(m(i, j));
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

const Ensemble& theorem_pair() {
  static const Ensemble e =
      make_ensemble(parse_channel_list("ad:67/100,bf:87/100"), {Rational(1, 2), Rational(1, 2)}, 2);
  return e;
}

const Certificate& white_noise_certificate() {
  static const Certificate c = [] {
    const SpaceStructure slots{{"I1", 2}, {"O1", 2}, {"I2", 2}, {"O2", 2}};
    const FloatLabeled t(slots, FloatMatrix::identity(16) * cplx(0.125));
    return certify_lower({t, t}, theorem_pair(), Strategy::Gen);
  }();
  return c;
}

void BM_AllPsdExact(benchmark::State& state) {
  const auto batch = psd_batch(16);
  for (auto _ : state) benchmark::DoNotOptimize(all_psd_exact(batch, exec_of(state)));
}
BENCHMARK(BM_AllPsdExact)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CommonEta(benchmark::State& state) {
  auto candidates = psd_batch(8);
  candidates[3] -= ExactMatrix::identity(16) * ExactComplex(90);
  const std::vector<ExactMatrix> targets(candidates.size(), ExactMatrix::identity(16));
  for (auto _ : state) benchmark::DoNotOptimize(common_eta(candidates, targets, 30, exec_of(state)));
}
BENCHMARK(BM_CommonEta)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RunChecks(benchmark::State& state) {
  const Certificate& c = white_noise_certificate();
  for (auto _ : state) benchmark::DoNotOptimize(run_checks(c, exec_of(state)));
}
BENCHMARK(BM_RunChecks)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Census(benchmark::State& state) {
  CensusConfig cfg;
  cfg.samples = 4;
  cfg.seed = 3;
  cfg.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(run_census(cfg));
}
BENCHMARK(BM_Census)->Arg(0)->Arg(1)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
