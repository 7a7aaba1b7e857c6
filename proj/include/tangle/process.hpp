#pragma once

#include <cstdint>
#include <vector>

#include "tangle/rng.hpp"

namespace tangle {

// Arrival rate lambda, proof-of-work duration h, and the delay m = lambda*h
// measured in arrival steps. Arrivals are deterministic at t_n = n/lambda;
// the n-th arrival's edges attach m steps later.
struct ModelParams {
  double lambda = 0.0;
  double h = 0.0;
  std::int64_t m = 0;

  // Throws std::invalid_argument unless lambda > 0, h > 0 and lambda*h is a
  // whole number >= 1 (checked to 1e-9 relative). Non-integer lambda*h is
  // rejected, not rounded.
  static ModelParams create(double lambda, double h);
};

// Seed data for the discrete process: the free-tip count at step m and the
// selection counts u_1..u_m assumed for the warm-up window.
struct DiscreteInit {
  std::int64_t initial_free = 1;  // >= 1
  std::vector<int> u;             // length m, each value in {0,1,2}

  void validate(std::int64_t m) const;  // throws std::invalid_argument
};

// Conditional law of the number of distinct free tips picked by the next
// arrival, given X free and W pending tips. Two tips are drawn independently
// and uniformly from all L = X + W tips; hitting the same free tip twice
// counts as one.
struct UTriple {
  double p0 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
};

// p2 = X(X-1)/L^2, p0 = W^2/L^2, p1 = (2WX + X)/L^2. Requires L >= 1.
// Ratios of integers; exact in double for L < 2^26.
UTriple u_distribution(std::int64_t free_tips, std::int64_t pending_tips);

// 2X/L - X/L^2, the mean of u_distribution. Requires L >= 1.
double expected_u(std::int64_t free_tips, std::int64_t pending_tips);

// Inverse-CDF sample from the triple using one uniform draw. Category
// boundaries are p0 and 1 - p2; a draw landing exactly on a boundary takes
// the lower category. The complement 1 - p2 keeps the top category
// unreachable when p2 == 0 even if p0 + p1 rounded below 1, which is what
// preserves the X >= 1 floor.
int sample_u(const UTriple& p, RngStream& rng);

// Exact state of the tip process at some step n >= m. Value type.
// Invariants: total == free + pending, pending == sum of the selection
// window, free >= 1.
class TangleState {
 public:
  TangleState(const ModelParams& params, const DiscreteInit& init);

  std::int64_t n() const { return n_; }
  std::int64_t free_tips() const { return free_; }
  std::int64_t pending_tips() const { return pending_; }
  std::int64_t total_tips() const { return total_; }
  std::int64_t delay_steps() const { return m_; }

  // The last m selection counts U_{n-m+1}..U_n in chronological order.
  std::vector<int> selection_window() const;

  // Samples U_{n+1} from the current counts, advances one step, and returns
  // the sampled value.
  int step(RngStream& rng);

 private:
  std::int64_t window_sum() const;

  std::int64_t m_ = 0;
  std::int64_t n_ = 0;
  std::int64_t free_ = 0;
  std::int64_t pending_ = 0;
  std::int64_t total_ = 0;
  std::vector<int> window_;  // ring buffer; window_[head_] is the oldest
  std::size_t head_ = 0;
};

struct TraceRow {
  std::int64_t n = 0;
  std::int64_t free_tips = 0;
  std::int64_t pending_tips = 0;
  std::int64_t total_tips = 0;
  int u = 0;
};

// Recorded path of the process from step m. Row i holds the state at step
// start_n + i together with the selection count consumed at that step.
struct Trace {
  ModelParams params;
  std::int64_t start_n = 0;
  std::vector<std::int64_t> free_tips;
  std::vector<std::int64_t> pending_tips;
  std::vector<std::int64_t> total_tips;
  std::vector<int> u;

  std::size_t size() const { return free_tips.size(); }
  double time_at(std::size_t i) const {
    return static_cast<double>(start_n + static_cast<std::int64_t>(i)) /
           params.lambda;
  }
  TraceRow row(std::size_t i) const;
};

TangleState init_state(const ModelParams& params, const DiscreteInit& init);

// Simulates n_steps transitions from the seeded state. The first row of the
// trace is the initial state (its u column is u_m). Deterministic given the
// stream's seed.
Trace run(const ModelParams& params, const DiscreteInit& init,
          std::int64_t n_steps, RngStream& rng);

// Total tips at step m + j, 0 <= j <= m: determined by the seed data alone,
// before any randomness enters.
std::int64_t l_from_init(std::int64_t j, const DiscreteInit& init);

}  // namespace tangle
