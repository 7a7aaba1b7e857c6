#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tangle/coupling.hpp"
#include "tangle/fluid.hpp"
#include "tangle/process.hpp"

namespace tangle {

enum class Channel { free_tips, total_tips };

// Largest absolute gap between a rescaled trace and the fluid solution over
// [t_lo, t_hi], evaluated at the union of the trace's arrival times and the
// solution's grid nodes. The trace is held constant between arrivals and the
// solution interpolated by cubic Hermite; since |a'| <= 1 and trace jumps
// are at most 1/lambda, the union grid captures the true sup up to a term
// of the grid-gap scale.
double sup_deviation(const RescaledTrace& rt, const FluidSolution& sol,
                     double t_lo, double t_hi,
                     Channel ch = Channel::free_tips);

// One replica's simulation distance from the fluid solution.
// sup_dev_a is taken over [h, T], sup_dev_b over [2h, T].
struct DeviationRecord {
  double lambda = 0.0;
  int replica = 0;
  std::uint64_t seed = 0;  // derived engine seed of the replica's stream
  int tries = 0;           // rejection-sampler attempts for the warm-up
  double sup_dev_a = 0.0;
  double sup_dev_b = 0.0;
  bool ok = false;  // false when warm-up sampling was exhausted
};

struct SweepSummary {
  double lambda = 0.0;
  double median_a = 0.0;
  double q75_a = 0.0;
  int n_ok = 0;
  int n_skipped = 0;
};

struct SweepConfig {
  std::vector<double> lambdas;
  double horizon = 0.0;  // T, >= 2h
  int replicas = 1;
  std::uint64_t base_seed = 1;
  int max_tries = 64;
  double dt = 0.0;  // solver step; 0 selects h/1000
  int workers = 1;  // replica fan-out; results do not depend on it
};

struct SweepReport {
  SweepConfig config;
  std::vector<DeviationRecord> records;  // ordered by (lambda index, replica)
  std::vector<SweepSummary> summary;     // one row per lambda, input order
  double slope = 0.0;  // log-log OLS of median vs lambda; NaN if degenerate
};

// Warm-up sampling plus a full simulation covering [h, T]. The same stream
// drives the rejection sampler and the process, so the outcome is a pure
// function of the stream's seed.
struct ReplicaRun {
  DiscreteInit init;
  int tries = 0;
  Trace trace;
};
ReplicaRun simulate_replica(const DdeInit& init, double lambda, double horizon,
                            int max_tries, RngStream& rng);

// For each lambda and replica: sample an admissible warm-up, simulate,
// rescale, and measure deviations against one shared fluid solution. Replica
// (i, r) owns the stream with id (i << 32) | r derived from base_seed, and
// records land in preassigned slots, so the report is identical for any
// worker count. Replicas whose warm-up sampling exhausts are recorded with
// ok = false and skipped in the summaries.
SweepReport lambda_sweep(const DdeInit& init, const SweepConfig& cfg);

// Ordinary least squares on (log x, log y). Throws std::invalid_argument on
// fewer than two distinct abscissae or nonpositive values (all-zero medians
// are degenerate).
double fit_slope(const std::vector<std::pair<double, double>>& points);

// Constants of the exponential envelope that drives the solution to its
// stationary point (a, b) = (h, 2h).
struct DecayConstants {
  double amplitude = 0.0;    // sup over the bootstrap interval of |a - h|
  double contraction = 0.0;  // per-2h contraction factor, in [3/4, 1)
  double rate = 0.0;         // -log(contraction) / (2h)
};

// amplitude from the stored bootstrap-interval samples;
// contraction = max(3/4, exp(-h / (3(amplitude/2 + h)))).
DecayConstants decay_constants(const DdeInit& init, const FluidSolution& sol);

struct DecayRow {
  double t = 0.0;
  double deviation = 0.0;  // |a(t) - h|
  double bound = 0.0;      // amplitude * contraction^{-3/2} * exp(-rate * t)
};

struct DecayReport {
  DecayConstants constants;
  double worst_margin = 0.0;  // max over nodes of deviation - bound
  double fitted_rate = 0.0;   // from log-deviations above 1e-12; NaN if < 2
                              // points survive the filter
  bool bound_ok = false;      // worst_margin <= tol at every node
  bool delay_ok = false;      // b(t+h) == a(t) + h bit-exact at nodes
  bool rate_ok = false;       // fitted_rate >= rate - 0.01/h, waived when the
                              // amplitude is below 1e-6 or the fit is empty
  std::vector<DecayRow> rows;

  bool pass() const { return bound_ok && delay_ok && rate_ok; }
};

// Envelope check on every node t in [4h, T-h], plus an empirical decay-rate
// fit on [4h, T]. The envelope rate is a lower bound on the true decay, so
// the fitted rate routinely exceeds it.
DecayReport decay_check(const DdeInit& init, const FluidSolution& sol,
                        double horizon, double tol = 1e-9);

}  // namespace tangle
