// qdisc: channel discrimination under PAR / SEQ / SEP / GEN strategies.
//
//   qdisc discriminate --channels ad:0.67,bf:0.87 --priors 0.5,0.5
//   qdisc certify --channels ad:0.67,bf:0.87 --assert-hierarchy --out-dir certs
//   qdisc hierarchy-scan --samples 500 --seed 7 --out census.csv
//   qdisc sweep --gamma-start 0.5 --gamma-stop 0.7 --gamma-step 0.05 --out sweep.csv
//
// QDISC_THREADS sets the OpenMP thread count (--threads overrides it).

#include <omp.h>

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qdisc/certificate_json.hpp"
#include "qdisc/certify.hpp"
#include "qdisc/experiments.hpp"

using namespace qdisc;

namespace {

struct Common {
  std::string channels;
  std::string priors;
  std::string strategies = "par,seq12,sep,gen";
  int copies = 2;
  double tol = 1e-9;
};

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

Ensemble ensemble_of(const Common& c) {
  const auto specs = parse_channel_list(c.channels);
  std::vector<Rational> priors;
  if (c.priors.empty()) {
    for (std::size_t i = 0; i < specs.size(); ++i) priors.push_back(Rational(1, static_cast<unsigned long>(specs.size())));
  } else {
    for (const auto& p : split(c.priors)) priors.push_back(parse_rational(p));
  }
  return make_ensemble(specs, priors, c.copies);
}

std::vector<Strategy> strategies_of(const Common& c) {
  std::vector<Strategy> out;
  for (const auto& s : split(c.strategies)) out.push_back(parse_strategy(s));
  if (out.empty()) throw std::invalid_argument("no strategies requested");
  return out;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--channels", c.channels, "comma-separated specs: ad:g, bf:p, random:seed=N, id")->required();
  app->add_option("--priors", c.priors, "comma-separated priors (decimal or n/d); default uniform");
  app->add_option("--strategies", c.strategies, "subset of par,seq12,seq21,sep,gen");
  app->add_option("--copies", c.copies, "uses of the unknown channel (1 or 2)")->check(CLI::Range(1, 2));
  app->add_option("--tol", c.tol, "solver gap tolerance")->check(CLI::PositiveNumber);
}

std::string config_line(const std::string& command, const Common& c) {
  std::ostringstream out;
  out << "qdisc " << kVersion << ' ' << command << " channels=" << c.channels << " priors=" << c.priors
      << " strategies=" << c.strategies << " copies=" << c.copies << " tol=" << c.tol;
  return out.str();
}

int cmd_discriminate(const Common& c, const std::string& formulation, bool cross_check) {
  const Ensemble e = ensemble_of(c);
  DiscriminationOptions opt;
  opt.tol = c.tol;
  opt.cross_check = cross_check;
  if (formulation == "primal") opt.formulation = Formulation::Primal;
  else if (formulation == "dual") opt.formulation = Formulation::Dual;
  else if (formulation != "auto") throw std::invalid_argument("formulation must be auto, primal or dual");

  std::printf("# %s\n", config_line("discriminate", c).c_str());
  std::printf("%-6s %-14s %-14s %-14s %-9s %-10s %-10s %-10s %-10s\n", "strat", "value", "primal", "dual", "gap",
              "status", "proj_def", "min_eig", "tr_def");
  int rc = 0;
  for (Strategy s : strategies_of(c)) {
    const DiscriminationResult r = discriminate(e, s, opt);
    const WitnessResiduals w = witness_residuals(r);
    std::printf("%-6s %-14.10f %-14.10f %-14.10f %-9.1e %-10s %-10.1e %-10.1e %-10.1e\n", to_string(s).c_str(), r.value,
                r.primal_value, r.dual_value, r.gap, to_string(r.status).c_str(), w.projector_defect, w.min_eigenvalue,
                w.trace_defect);
    if (r.cross_check_value) std::printf("       cross-check %.10f\n", *r.cross_check_value);
    if (r.status != SdpStatus::Optimal) rc = 1;
  }
  return rc;
}

std::string describe(const RadicalSum& x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10f", x.to_double());
  return std::string(buf) + "  (" + to_string(x) + ")";
}

int cmd_certify(const Common& c, const std::string& out_dir, bool assert_hierarchy) {
  const Ensemble e = ensemble_of(c);
  if (!e.has_exact()) throw std::invalid_argument("certify needs channels with an exact form (ad, bf, id)");
  DiscriminationOptions sopt;
  sopt.tol = c.tol;
  std::filesystem::create_directories(out_dir);
  std::printf("# %s\n", config_line("certify", c).c_str());

  std::vector<CertifiedStrategy> done;
  int rc = 0;
  for (Strategy s : strategies_of(c)) {
    try {
      auto cs = certify_strategies(e, {s}, sopt).front();
      for (const Certificate* cert : {&cs.lower, &cs.upper}) {
        const auto path = std::filesystem::path(out_dir) / (to_string(s) + "_" + to_string(cert->direction) + ".json");
        nlohmann::json j = certificate_to_json(*cert);
        j["run_config"] = config_line("certify", c);
        std::ofstream(path) << j.dump(1) << '\n';
        const bool ok = verify(load_certificate(path));
        std::printf("%-6s %-5s %s  verify=%s  %s\n", to_string(s).c_str(), to_string(cert->direction).c_str(),
                    describe(cert->bound).c_str(), ok ? "ok" : "FAILED", path.string().c_str());
        if (!ok) rc = 1;
      }
      done.push_back(std::move(cs));
    } catch (const CertificationFailed& ex) {
      std::printf("%-6s certification failed: %s\n", to_string(s).c_str(), ex.what());
      rc = 1;
    }
  }
  if (assert_hierarchy) {
    const auto levels = hierarchy_levels(done);
    const bool strict = rc == 0 && strict_hierarchy(levels);
    std::printf("hierarchy:");
    for (const auto& l : levels) std::printf(" %s[%.10f, %.10f]", l.name.c_str(), l.lower.to_double(), l.upper.to_double());
    std::printf(" -> %s\n", strict ? "strict" : "NOT strict");
    if (!strict) rc = 2;
  }
  return rc;
}

int cmd_scan(CensusConfig cfg, const std::string& out, const std::string& summary_out) {
  const CensusResult r = run_census(cfg);
  if (out.empty()) {
    write_census_csv(std::cout, cfg, r);
  } else {
    std::ofstream f(out);
    write_census_csv(f, cfg, r);
  }
  if (summary_out.empty()) {
    write_census_summary(std::cerr, r.summary);
  } else {
    std::ofstream f(summary_out);
    f << "# qdisc " << kVersion << " hierarchy-scan samples=" << cfg.samples << " seed=" << cfg.seed
      << " gap_threshold=" << cfg.gap_threshold << '\n';
    write_census_summary(f, r.summary);
  }
  return r.summary.unsolved == 0 ? 0 : 1;
}

int cmd_sweep(SweepConfig cfg, const std::string& out) {
  const auto rows = run_sweep(cfg);
  if (out.empty()) {
    write_sweep_csv(std::cout, cfg, rows);
  } else {
    std::ofstream f(out);
    write_sweep_csv(f, cfg, rows);
  }
  for (const auto& r : rows)
    if (!r.solved) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum channel discrimination with certified bounds"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("qdisc ") + kVersion);
  int threads = 0;
  bool serial = false;
  app.add_option("--threads", threads, "OpenMP threads (default: QDISC_THREADS or the runtime default)");

  Common dc;
  std::string formulation = "auto";
  bool cross_check = false;
  auto* disc = app.add_subcommand("discriminate", "float optimum per strategy");
  add_common(disc, dc);
  disc->add_option("--formulation", formulation, "auto, primal or dual");
  disc->add_flag("--cross-check", cross_check, "solve the other formulation as well");

  Common cc;
  std::string out_dir = "certificates";
  bool assert_hierarchy = false;
  auto* cert = app.add_subcommand("certify", "exact lower and upper bounds, one JSON certificate each");
  add_common(cert, cc);
  cert->add_option("--out-dir", out_dir, "directory for certificates");
  cert->add_flag("--assert-hierarchy", assert_hierarchy, "fail unless the certified brackets are strictly ordered");

  CensusConfig census;
  std::string scan_out, scan_summary;
  auto* scan = app.add_subcommand("hierarchy-scan", "census of strategy gaps over random qubit channel pairs");
  scan->add_option("--samples", census.samples, "number of channel pairs")->check(CLI::NonNegativeNumber);
  scan->add_option("--seed", census.seed, "master seed");
  scan->add_option("--threshold", census.gap_threshold, "gap classification threshold");
  scan->add_option("--tol", census.tol, "solver gap tolerance");
  scan->add_option("--out", scan_out, "per-pair CSV (default stdout)");
  scan->add_option("--summary", scan_summary, "summary CSV (default stderr)");
  scan->add_flag("--serial", serial, "disable the OpenMP path");

  SweepConfig sweep;
  double g0 = 0.5, g1 = 0.7, gstep = 0.05;
  std::string sweep_gammas, sweep_out;
  auto* sw = app.add_subcommand("sweep", "AD(gamma) vs BF(eta) over a gamma grid");
  sw->add_option("--gamma-start", g0, "first amplitude-damping parameter");
  sw->add_option("--gamma-stop", g1, "last grid point (inclusive)");
  sw->add_option("--gamma-step", gstep, "grid spacing");
  sw->add_option("--gammas", sweep_gammas, "explicit comma-separated grid (overrides start/stop/step)");
  sw->add_option("--eta", sweep.eta, "bit-flip parameter");
  sw->add_option("--tol", sweep.tol, "solver gap tolerance");
  sw->add_option("--out", sweep_out, "CSV (default stdout)");
  sw->add_flag("--serial", serial, "disable the OpenMP path");

  CLI11_PARSE(app, argc, argv);

  if (threads <= 0) {
    if (const char* env = std::getenv("QDISC_THREADS")) threads = std::atoi(env);
  }
  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (*disc) return cmd_discriminate(dc, formulation, cross_check);
    if (*cert) return cmd_certify(cc, out_dir, assert_hierarchy);
    if (*scan) {
      census.exec = serial ? Execution::Serial : Execution::Parallel;
      return cmd_scan(census, scan_out, scan_summary);
    }
    if (*sw) {
      sweep.exec = serial ? Execution::Serial : Execution::Parallel;
      if (sweep_gammas.empty()) {
        sweep.gammas = linear_grid(g0, g1, gstep);
      } else {
        for (const auto& g : split(sweep_gammas)) sweep.gammas.push_back(std::stod(g));
      }
      return cmd_sweep(sweep, sweep_out);
    }
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "qdisc: %s\n", ex.what());
    return 3;
  }
  return 0;
}
