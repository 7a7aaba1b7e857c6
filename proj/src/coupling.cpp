#include "tangle/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tangle {

CouplingTargets targets(const DdeInit& init, double lambda) {
  init.validate();
  const ModelParams params = ModelParams::create(lambda, init.h);
  CouplingTargets out;
  out.m = params.m;
  out.initial_free =
      std::max<std::int64_t>(
          static_cast<std::int64_t>(std::floor(lambda * init.a_start)), 1);
  out.slot_means.resize(static_cast<std::size_t>(params.m));
  for (std::int64_t j = 1; j <= params.m; ++j) {
    const double lo = static_cast<double>(j - 1) / lambda;
    const double hi = static_cast<double>(j) / lambda;
    const double mean = lambda * init.u_integral(lo, hi);
    out.slot_means[static_cast<std::size_t>(j - 1)] =
        std::min(std::max(mean, 0.0), 2.0);
  }
  return out;
}

std::vector<int> sample_v(const CouplingTargets& t, RngStream& rng) {
  std::vector<int> v(t.slot_means.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double mean = t.slot_means[j];
    const double lo = std::floor(mean);
    const double frac = mean - lo;
    v[j] = static_cast<int>(lo) + (rng.uniform01() < frac ? 1 : 0);
  }
  return v;
}

double admissibility_bound(const DdeInit& init, double lambda) {
  return 4.0 * std::sqrt(init.h / lambda) + 1.0 / lambda;
}

double init_sup_deviation(const std::vector<int>& v, const DdeInit& init,
                          double lambda) {
  const CouplingTargets t = targets(init, lambda);
  const auto m = static_cast<std::size_t>(t.m);
  if (v.size() != m) {
    throw std::invalid_argument("init_sup_deviation: v must have m entries");
  }
  for (int value : v) {
    if (value < 0 || value > 2) {
      throw std::invalid_argument("init_sup_deviation: v values must be 0..2");
    }
  }
  // Warm-up totals: L_{m+j} = xi + j + sum of v over slots j+1..m.
  std::int64_t tail = 0;
  for (int value : v) tail += value;
  double sup = 0.0;
  for (std::size_t j = 0; j <= m; ++j) {
    if (j > 0) tail -= v[j - 1];
    const auto total = t.initial_free + static_cast<std::int64_t>(j) + tail;
    const double time = static_cast<double>(t.m + static_cast<std::int64_t>(j)) / lambda;
    const double dev =
        static_cast<double>(total) / lambda - bootstrap_b(init, time);
    sup = std::max(sup, std::fabs(dev));
  }
  return sup;
}

bool is_admissible(const std::vector<int>& v, const DdeInit& init,
                   double lambda) {
  return init_sup_deviation(v, init, lambda) <=
         admissibility_bound(init, lambda);
}

AdmissibleSample sample_admissible(const DdeInit& init, double lambda,
                                   RngStream& rng, int max_tries) {
  if (max_tries < 1) {
    throw std::invalid_argument("sample_admissible: max_tries must be >= 1");
  }
  const CouplingTargets t = targets(init, lambda);
  for (int attempt = 1; attempt <= max_tries; ++attempt) {
    std::vector<int> v = sample_v(t, rng);
    if (is_admissible(v, init, lambda)) {
      return AdmissibleSample{std::move(v), attempt};
    }
  }
  throw std::runtime_error(
      "sample_admissible: no admissible warm-up sequence within max_tries");
}

RescaledTrace::RescaledTrace(double lambda, std::int64_t start_n,
                             std::vector<double> a, std::vector<double> b)
    : lambda_(lambda), start_n_(start_n), a_(std::move(a)), b_(std::move(b)) {
  if (!(lambda_ > 0.0) || a_.empty() || a_.size() != b_.size()) {
    throw std::invalid_argument("RescaledTrace: invalid samples");
  }
}

bool RescaledTrace::covers(double t) const {
  const double slack = 1e-9 * std::max(1.0, t_end());
  return t >= t_begin() - slack && t <= t_end() + slack;
}

std::size_t RescaledTrace::index_at(double t) const {
  if (!covers(t)) {
    throw std::out_of_range("RescaledTrace: t outside the recorded window");
  }
  const auto n = static_cast<std::int64_t>(std::floor(lambda_ * t));
  const auto idx = std::clamp<std::int64_t>(
      n - start_n_, 0, static_cast<std::int64_t>(a_.size()) - 1);
  return static_cast<std::size_t>(idx);
}

double RescaledTrace::a_at(double t) const { return a_[index_at(t)]; }
double RescaledTrace::b_at(double t) const { return b_[index_at(t)]; }

RescaledTrace rescale(const Trace& trace, double lambda) {
  if (!(lambda > 0.0) ||
      std::fabs(lambda - trace.params.lambda) >
          1e-9 * std::max(1.0, trace.params.lambda)) {
    throw std::invalid_argument("rescale: lambda does not match the trace");
  }
  std::vector<double> a(trace.size()), b(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    a[i] = static_cast<double>(trace.free_tips[i]) / lambda;
    b[i] = static_cast<double>(trace.total_tips[i]) / lambda;
  }
  return RescaledTrace(lambda, trace.start_n, std::move(a), std::move(b));
}

}  // namespace tangle
