#pragma once

// Experiment drivers: the hierarchy census over random qubit channel pairs
// and the amplitude-damping vs bit-flip sweep. Both parallelise over
// independent solves; rows come out in index order regardless of threads.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qdisc/exact_matrix.hpp"
#include "qdisc/version.hpp"

namespace qdisc {

struct CensusConfig {
  int samples = 500;
  std::uint64_t seed = 1;
  double gap_threshold = 1e-6;
  double tol = 1e-9;
  Execution exec = Execution::Parallel;
};

struct CensusRow {
  int index = 0;
  std::uint64_t seed = 0;
  double par = 0, seq = 0, sep = 0, gen = 0;
  bool solved = false;  // every solve reported optimal
};

struct CensusSummary {
  int samples = 0;
  int par_seq = 0;  // P^PAR < P^SEQ
  int seq_sep = 0;
  int sep_gen = 0;
  int full = 0;  // all three gaps
  int unsolved = 0;
};

struct CensusResult {
  std::vector<CensusRow> rows;
  CensusSummary summary;
};

// Two channels per sample, both drawn from the stream derive_seed(seed, index).
CensusResult run_census(const CensusConfig& cfg);
CensusSummary summarize(const std::vector<CensusRow>& rows, double gap_threshold);
void write_census_csv(std::ostream& out, const CensusConfig& cfg, const CensusResult& r);
void write_census_summary(std::ostream& out, const CensusSummary& s);

struct SweepConfig {
  std::vector<double> gammas;
  double eta = 0.87;
  double tol = 1e-9;
  Execution exec = Execution::Parallel;
};

struct SweepRow {
  double gamma = 0;
  double par = 0, seq = 0, sep = 0, gen = 0;
  bool solved = false;
};

// Equiprobable {AD(gamma), BF(eta)} for each grid gamma, two copies.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg);
void write_sweep_csv(std::ostream& out, const SweepConfig& cfg, const std::vector<SweepRow>& rows);

// start, start + step, ... up to stop (inclusive within half a step).
std::vector<double> linear_grid(double start, double stop, double step);

}  // namespace qdisc
