#include "tangle/runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tangle/analysis.hpp"
#include "tangle/csv.hpp"

namespace tangle {

namespace {

namespace fs = std::filesystem;

bool write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << content;
  return static_cast<bool>(out);
}

DdeInit init_of(const RunConfig& cfg) {
  return DdeInit{cfg.a_start, cfg.h, cfg.u};
}

struct ModeOutcome {
  bool ok = true;
  std::string detail;  // extra `key=value` pairs for the RESULT line
};

ModeOutcome run_simulate(const RunConfig& cfg, const fs::path& out_dir) {
  ModeOutcome outcome;
  const DdeInit init = init_of(cfg);
  const CouplingTargets tg = targets(init, cfg.lambda);
  RngStream rng = RngStream::substream(cfg.base_seed, 0);

  CouplingRow row;
  row.lambda = cfg.lambda;
  row.xi_alpha = tg.initial_free;
  try {
    ReplicaRun rr = simulate_replica(init, cfg.lambda, cfg.horizon,
                                     cfg.max_tries, rng);
    row.tries = rr.tries;
    row.accepted = true;
    row.sup_dev_init = init_sup_deviation(rr.init.u, init, cfg.lambda);
    std::ostringstream trace;
    write_trace_csv(trace, rr.trace);
    if (!write_file(out_dir / "trace.csv", trace.str())) {
      outcome.ok = false;
      outcome.detail = " error=io";
    }
  } catch (const std::runtime_error&) {
    row.tries = cfg.max_tries;
    row.accepted = false;
    row.sup_dev_init = 0.0;
    outcome.ok = false;
    outcome.detail = " error=warmup_sampling_exhausted";
  }
  std::ostringstream coupling;
  write_coupling_csv(coupling, std::span<const CouplingRow>(&row, 1));
  if (!write_file(out_dir / "coupling.csv", coupling.str())) outcome.ok = false;
  outcome.detail += " tries=" + std::to_string(row.tries);
  return outcome;
}

ModeOutcome run_fluid(const RunConfig& cfg, const fs::path& out_dir) {
  ModeOutcome outcome;
  const FluidSolution sol = solve(init_of(cfg), cfg.horizon, cfg.dt);
  std::ostringstream fluid;
  write_fluid_csv(fluid, sol);
  if (!write_file(out_dir / "fluid.csv", fluid.str())) outcome.ok = false;

  const SolutionCheck check = verify_solution(sol);
  outcome.ok = outcome.ok && check.pass(1e-6, 1e-4);
  std::ostringstream detail;
  detail << " delay_residual=" << format_double(check.delay_residual)
         << " balance_residual=" << format_double(check.balance_residual);
  outcome.detail = detail.str();
  return outcome;
}

ModeOutcome run_sweep(const RunConfig& cfg, const fs::path& out_dir) {
  ModeOutcome outcome;
  SweepConfig sc;
  sc.lambdas = cfg.lambdas;
  sc.horizon = cfg.horizon;
  sc.replicas = cfg.replicas;
  sc.base_seed = cfg.base_seed;
  sc.max_tries = cfg.max_tries;
  sc.dt = cfg.dt;
  sc.workers = cfg.workers;
  const SweepReport report = lambda_sweep(init_of(cfg), sc);

  std::ostringstream sweep, summary;
  write_sweep_csv(sweep, report);
  write_summary_csv(summary, report);
  if (!write_file(out_dir / "sweep.csv", sweep.str()) ||
      !write_file(out_dir / "summary.csv", summary.str())) {
    outcome.ok = false;
  }
  for (const SweepSummary& row : report.summary) {
    if (row.n_ok == 0) {
      outcome.ok = false;
      outcome.detail += " error=lambda_without_replicas";
      break;
    }
  }
  outcome.detail += " slope=" + format_double(report.slope);
  return outcome;
}

ModeOutcome run_decay(const RunConfig& cfg, const fs::path& out_dir) {
  ModeOutcome outcome;
  const DdeInit init = init_of(cfg);
  const FluidSolution sol = solve(init, cfg.horizon, cfg.dt);
  const DecayReport report = decay_check(init, sol, cfg.horizon);
  std::ostringstream decay;
  write_decay_csv(decay, report);
  if (!write_file(out_dir / "decay.csv", decay.str())) outcome.ok = false;

  outcome.ok = outcome.ok && report.pass();
  std::ostringstream detail;
  detail << " amplitude=" << format_double(report.constants.amplitude)
         << " rate=" << format_double(report.constants.rate)
         << " fitted_rate=" << format_double(report.fitted_rate)
         << " worst_margin=" << format_double(report.worst_margin);
  outcome.detail = detail.str();
  return outcome;
}

}  // namespace

int run(const RunConfig& cfg) {
  const fs::path out_dir(cfg.out);
  if (fs::exists(out_dir) && !cfg.force) {
    std::cerr << "error: output directory `" << cfg.out
              << "` already exists (pass --force to overwrite)\n";
    return 2;
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create `" << cfg.out << "`: " << ec.message()
              << "\n";
    return 2;
  }

  const auto started = std::chrono::steady_clock::now();
  ModeOutcome outcome;
  try {
    switch (cfg.mode) {
      case Mode::simulate: outcome = run_simulate(cfg, out_dir); break;
      case Mode::fluid: outcome = run_fluid(cfg, out_dir); break;
      case Mode::sweep: outcome = run_sweep(cfg, out_dir); break;
      case Mode::decay: outcome = run_decay(cfg, out_dir); break;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  const std::chrono::duration<double> wall =
      std::chrono::steady_clock::now() - started;

  std::ostringstream manifest;
  manifest << "# tanglesim run manifest\n"
           << "version = " << kVersion << '\n'
           << "status = " << (outcome.ok ? "ok" : "fail") << '\n'
           << "wall_seconds = " << format_double(wall.count()) << '\n'
           << canonical_config(cfg);
  if (!write_file(out_dir / "manifest.txt", manifest.str())) {
    std::cerr << "error: cannot write manifest\n";
    return 2;
  }

  std::cout << "RESULT status=" << (outcome.ok ? "ok" : "fail")
            << " mode=" << mode_name(cfg.mode) << " out=" << cfg.out
            << outcome.detail << std::endl;
  return outcome.ok ? 0 : 1;
}

}  // namespace tangle
