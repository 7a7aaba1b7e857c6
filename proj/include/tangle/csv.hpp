#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>

#include "tangle/analysis.hpp"
#include "tangle/fluid.hpp"
#include "tangle/process.hpp"

namespace tangle {

// "%.17g": round-trippable and byte-stable for a fixed libc.
std::string format_double(double v);

// Header `n,t,X,W,L,U`; t = n/lambda at full precision.
void write_trace_csv(std::ostream& os, const Trace& trace);

// Header `t,a,b,da`, one row per grid node.
void write_fluid_csv(std::ostream& os, const FluidSolution& sol);

struct CouplingRow {
  double lambda = 0.0;
  std::int64_t xi_alpha = 0;
  int tries = 0;
  bool accepted = false;
  double sup_dev_init = 0.0;
};

// Header `lambda,xi_alpha,tries,accepted,sup_dev_init`.
void write_coupling_csv(std::ostream& os, std::span<const CouplingRow> rows);

// Header `lambda,replica,seed,tries,sup_dev_A,sup_dev_B`. Skipped replicas
// report empty deviation fields.
void write_sweep_csv(std::ostream& os, const SweepReport& report);

// Header `lambda,median_A,q75_A,n_ok,n_skipped`.
void write_summary_csv(std::ostream& os, const SweepReport& report);

// Header `t,abs_a_minus_h,bound`.
void write_decay_csv(std::ostream& os, const DecayReport& report);

}  // namespace tangle
