#include "qdisc/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "qdisc/channels.hpp"
#include "qdisc/discrimination.hpp"

namespace qdisc {

namespace {

struct FourValues {
  double par = 0, seq = 0, sep = 0, gen = 0;
  bool solved = true;
};

// SEQ uses the 1<2 order only: for ensembles of the form C (x) C the two
// orders are related by the slot swap and give the same value.
FourValues four_strategies(const Ensemble& e, double tol) {
  DiscriminationOptions opt;
  opt.tol = tol;
  FourValues out;
  auto run = [&](Strategy s) {
    const DiscriminationResult r = discriminate(e, s, opt);
    if (r.status != SdpStatus::Optimal) out.solved = false;
    return r.value;
  };
  out.par = run(Strategy::Par);
  out.seq = run(Strategy::Seq12);
  out.sep = run(Strategy::Sep);
  out.gen = run(Strategy::Gen);
  return out;
}

template <class F>
void for_each_index(long n, Execution exec, F&& body) {
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) body(i);
  } else {
    for (long i = 0; i < n; ++i) body(i);
  }
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12f", x);
  return buf;
}

}  // namespace

CensusResult run_census(const CensusConfig& cfg) {
  if (cfg.samples < 0) throw std::invalid_argument("census: negative sample count");
  CensusResult out;
  out.rows.resize(static_cast<std::size_t>(cfg.samples));
  const std::vector<Rational> priors{Rational(1, 2), Rational(1, 2)};
  for_each_index(cfg.samples, cfg.exec, [&](long i) {
    CensusRow& row = out.rows[static_cast<std::size_t>(i)];
    row.index = static_cast<int>(i);
    row.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
    try {
      std::mt19937_64 rng(row.seed);
      const FloatLabeled a = random_channel(2, 2, rng);
      const FloatLabeled b = random_channel(2, 2, rng);
      const FourValues v = four_strategies(make_ensemble(std::vector<FloatLabeled>{a, b}, priors, 2), cfg.tol);
      row.par = v.par;
      row.seq = v.seq;
      row.sep = v.sep;
      row.gen = v.gen;
      row.solved = v.solved;
    } catch (const std::exception&) {
      row.solved = false;
    }
  });
  out.summary = summarize(out.rows, cfg.gap_threshold);
  return out;
}

CensusSummary summarize(const std::vector<CensusRow>& rows, double gap_threshold) {
  CensusSummary s;
  for (const auto& r : rows) {
    ++s.samples;
    if (!r.solved) {
      ++s.unsolved;
      continue;
    }
    const bool a = r.seq - r.par > gap_threshold;
    const bool b = r.sep - r.seq > gap_threshold;
    const bool c = r.gen - r.sep > gap_threshold;
    s.par_seq += a;
    s.seq_sep += b;
    s.sep_gen += c;
    s.full += a && b && c;
  }
  return s;
}

void write_census_csv(std::ostream& out, const CensusConfig& cfg, const CensusResult& r) {
  out << "# qdisc " << kVersion << " hierarchy-scan samples=" << cfg.samples << " seed=" << cfg.seed
      << " gap_threshold=" << cfg.gap_threshold << " tol=" << cfg.tol << " dims=2x2 priors=1/2,1/2 copies=2\n";
  out << "index,seed,par,seq,sep,gen,solved\n";
  for (const auto& row : r.rows) {
    out << row.index << ',' << row.seed << ',' << fmt(row.par) << ',' << fmt(row.seq) << ',' << fmt(row.sep) << ','
        << fmt(row.gen) << ',' << (row.solved ? 1 : 0) << '\n';
  }
}

void write_census_summary(std::ostream& out, const CensusSummary& s) {
  out << "gap,count,samples\n";
  out << "PAR<SEQ," << s.par_seq << ',' << s.samples << '\n';
  out << "SEQ<SEP," << s.seq_sep << ',' << s.samples << '\n';
  out << "SEP<GEN," << s.sep_gen << ',' << s.samples << '\n';
  out << "PAR<SEQ<SEP<GEN," << s.full << ',' << s.samples << '\n';
  out << "unsolved," << s.unsolved << ',' << s.samples << '\n';
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  std::vector<SweepRow> rows(cfg.gammas.size());
  const std::vector<Rational> priors{Rational(1, 2), Rational(1, 2)};
  for_each_index(static_cast<long>(rows.size()), cfg.exec, [&](long i) {
    SweepRow& row = rows[static_cast<std::size_t>(i)];
    row.gamma = cfg.gammas[static_cast<std::size_t>(i)];
    try {
      const std::vector<FloatLabeled> chois{amplitude_damping(row.gamma), bit_flip(cfg.eta)};
      const FourValues v = four_strategies(make_ensemble(chois, priors, 2), cfg.tol);
      row.par = v.par;
      row.seq = v.seq;
      row.sep = v.sep;
      row.gen = v.gen;
      row.solved = v.solved;
    } catch (const std::exception&) {
      row.solved = false;
    }
  });
  return rows;
}

void write_sweep_csv(std::ostream& out, const SweepConfig& cfg, const std::vector<SweepRow>& rows) {
  out << "# qdisc " << kVersion << " sweep eta=" << cfg.eta << " tol=" << cfg.tol << " points=" << cfg.gammas.size()
      << " channels=ad:gamma,bf:eta priors=1/2,1/2 copies=2\n";
  out << "gamma,par,seq,sep,gen\n";
  for (const auto& r : rows) {
    char g[32];
    std::snprintf(g, sizeof g, "%.6f", r.gamma);
    if (!r.solved) {
      out << g << ",nan,nan,nan,nan\n";
      continue;
    }
    out << g << ',' << fmt(r.par) << ',' << fmt(r.seq) << ',' << fmt(r.sep) << ',' << fmt(r.gen) << '\n';
  }
}

std::vector<double> linear_grid(double start, double stop, double step) {
  if (!(step > 0)) throw std::invalid_argument("grid step must be positive");
  std::vector<double> out;
  const long n = std::lround(std::floor((stop - start) / step + 0.5));
  for (long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

}  // namespace qdisc
