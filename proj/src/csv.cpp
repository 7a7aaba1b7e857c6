#include "tangle/csv.hpp"

#include <cmath>
#include <cstdio>

namespace tangle {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << "n,t,X,W,L,U\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const TraceRow row = trace.row(i);
    os << row.n << ',' << format_double(trace.time_at(i)) << ','
       << row.free_tips << ',' << row.pending_tips << ',' << row.total_tips
       << ',' << row.u << '\n';
  }
}

void write_fluid_csv(std::ostream& os, const FluidSolution& sol) {
  os << "t,a,b,da\n";
  for (std::size_t k = 0; k < sol.size(); ++k) {
    os << format_double(sol.time_at(k)) << ',' << format_double(sol.a()[k])
       << ',' << format_double(sol.b()[k]) << ','
       << format_double(sol.da()[k]) << '\n';
  }
}

void write_coupling_csv(std::ostream& os, std::span<const CouplingRow> rows) {
  os << "lambda,xi_alpha,tries,accepted,sup_dev_init\n";
  for (const CouplingRow& row : rows) {
    os << format_double(row.lambda) << ',' << row.xi_alpha << ',' << row.tries
       << ',' << (row.accepted ? 1 : 0) << ','
       << format_double(row.sup_dev_init) << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const SweepReport& report) {
  os << "lambda,replica,seed,tries,sup_dev_A,sup_dev_B\n";
  for (const DeviationRecord& rec : report.records) {
    os << format_double(rec.lambda) << ',' << rec.replica << ',' << rec.seed
       << ',' << rec.tries << ',';
    if (rec.ok) {
      os << format_double(rec.sup_dev_a) << ',' << format_double(rec.sup_dev_b);
    } else {
      os << ',';
    }
    os << '\n';
  }
}

void write_summary_csv(std::ostream& os, const SweepReport& report) {
  os << "lambda,median_A,q75_A,n_ok,n_skipped\n";
  for (const SweepSummary& row : report.summary) {
    os << format_double(row.lambda) << ','
       << (row.n_ok > 0 ? format_double(row.median_a) : std::string{}) << ','
       << (row.n_ok > 0 ? format_double(row.q75_a) : std::string{}) << ','
       << row.n_ok << ',' << row.n_skipped << '\n';
  }
}

void write_decay_csv(std::ostream& os, const DecayReport& report) {
  os << "t,abs_a_minus_h,bound\n";
  for (const DecayRow& row : report.rows) {
    os << format_double(row.t) << ',' << format_double(row.deviation) << ','
       << format_double(row.bound) << '\n';
  }
}

}  // namespace tangle
