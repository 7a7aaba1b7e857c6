#pragma once

#include <cstdint>
#include <vector>

#include "tangle/fluid.hpp"
#include "tangle/process.hpp"
#include "tangle/rng.hpp"

namespace tangle {

// Discrete targets derived from a fluid initial condition at arrival rate
// lambda: the rounded free-tip count and the per-slot means
// x_j = lambda * integral of u over [(j-1)/lambda, j/lambda], each in [0,2].
struct CouplingTargets {
  std::int64_t m = 0;
  std::int64_t initial_free = 1;  // max(floor(lambda * a(h)), 1)
  std::vector<double> slot_means;
};

// Requires lambda*h to be a whole number >= 1. Slot integrals are computed
// analytically from the piecewise-constant profile.
CouplingTargets targets(const DdeInit& init, double lambda);

// Independent v_j in {0,1,2} with E[v_j] = x_j: two-point distribution on
// {floor(x_j), ceil(x_j)} taking the upper value with probability frac(x_j).
// Minimal variance among {0,1,2}-valued laws with that mean; integer means
// are deterministic.
std::vector<int> sample_v(const CouplingTargets& t, RngStream& rng);

// Deviation allowance for an admissible warm-up sequence:
// 4 sqrt(h/lambda) + 1/lambda.
double admissibility_bound(const DdeInit& init, double lambda);

// sup over n in [m, 2m] of |B_v(t_n) - b(t_n)|, where B_v is the rescaled
// total-tip path the sequence v induces through the warm-up formula and b is
// the closed-form bootstrap.
double init_sup_deviation(const std::vector<int>& v, const DdeInit& init,
                          double lambda);

// True iff the deviation above is <= admissibility_bound (inclusive).
bool is_admissible(const std::vector<int>& v, const DdeInit& init,
                   double lambda);

struct AdmissibleSample {
  std::vector<int> v;
  int tries = 0;
};

// Rejection-samples sample_v until is_admissible holds. Per-try success
// probability is at least 3/4, so exhaustion is not expected in practice;
// throws std::runtime_error after max_tries failures.
AdmissibleSample sample_admissible(const DdeInit& init, double lambda,
                                   RngStream& rng, int max_tries = 64);

// Step functions A(t) = X_{n(t)}/lambda and B(t) = L_{n(t)}/lambda with
// n(t) = floor(lambda * t), sampled at the arrival times of a trace.
class RescaledTrace {
 public:
  RescaledTrace(double lambda, std::int64_t start_n, std::vector<double> a,
                std::vector<double> b);

  double lambda() const { return lambda_; }
  std::size_t size() const { return a_.size(); }
  std::int64_t start_n() const { return start_n_; }
  double time_at(std::size_t i) const {
    return static_cast<double>(start_n_ + static_cast<std::int64_t>(i)) /
           lambda_;
  }
  double a_value(std::size_t i) const { return a_[i]; }
  double b_value(std::size_t i) const { return b_[i]; }
  double t_begin() const { return time_at(0); }
  double t_end() const { return time_at(a_.size() - 1); }
  bool covers(double t) const;

  double a_at(double t) const;  // constant between arrivals
  double b_at(double t) const;

 private:
  std::size_t index_at(double t) const;

  double lambda_ = 0.0;
  std::int64_t start_n_ = 0;
  std::vector<double> a_, b_;
};

RescaledTrace rescale(const Trace& trace, double lambda);

}  // namespace tangle
