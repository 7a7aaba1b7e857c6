#include "tangle/process.hpp"

#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tangle {

ModelParams ModelParams::create(double lambda, double h) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("ModelParams: lambda must be positive");
  }
  if (!(h > 0.0)) {
    throw std::invalid_argument("ModelParams: h must be positive");
  }
  const double product = lambda * h;
  const auto m = static_cast<std::int64_t>(std::llround(product));
  if (m < 1 ||
      std::fabs(product - static_cast<double>(m)) >
          1e-9 * std::max(1.0, product)) {
    throw std::invalid_argument(
        "ModelParams: lambda*h must be a whole number of steps >= 1");
  }
  return ModelParams{lambda, h, m};
}

void DiscreteInit::validate(std::int64_t m) const {
  if (initial_free < 1) {
    throw std::invalid_argument("DiscreteInit: initial_free must be >= 1");
  }
  if (static_cast<std::int64_t>(u.size()) != m) {
    throw std::invalid_argument(
        "DiscreteInit: u must have exactly m = lambda*h entries");
  }
  for (int value : u) {
    if (value < 0 || value > 2) {
      throw std::invalid_argument("DiscreteInit: u values must be 0, 1 or 2");
    }
  }
}

UTriple u_distribution(std::int64_t free_tips, std::int64_t pending_tips) {
  if (free_tips < 0 || pending_tips < 0 || free_tips + pending_tips < 1) {
    throw std::domain_error("u_distribution: need X >= 0, W >= 0, X + W >= 1");
  }
  const double x = static_cast<double>(free_tips);
  const double w = static_cast<double>(pending_tips);
  const double l = x + w;
  const double l2 = l * l;
  UTriple p;
  p.p2 = free_tips < 2 ? 0.0 : x * (x - 1.0) / l2;
  p.p0 = w * w / l2;
  p.p1 = (2.0 * w * x + x) / l2;
  return p;
}

double expected_u(std::int64_t free_tips, std::int64_t pending_tips) {
  if (free_tips < 0 || pending_tips < 0 || free_tips + pending_tips < 1) {
    throw std::domain_error("expected_u: need X >= 0, W >= 0, X + W >= 1");
  }
  const double x = static_cast<double>(free_tips);
  const double l = x + static_cast<double>(pending_tips);
  return 2.0 * x / l - x / (l * l);
}

int sample_u(const UTriple& p, RngStream& rng) {
  const double r = rng.uniform01();
  if (r <= p.p0) return 0;
  if (r <= 1.0 - p.p2) return 1;
  return 2;
}

TangleState::TangleState(const ModelParams& params, const DiscreteInit& init)
    : m_(params.m), n_(params.m), window_(init.u.begin(), init.u.end()) {
  init.validate(params.m);
  free_ = init.initial_free;
  pending_ = window_sum();
  total_ = free_ + pending_;
}

std::vector<int> TangleState::selection_window() const {
  std::vector<int> out;
  out.reserve(window_.size());
  for (std::size_t i = 0; i < window_.size(); ++i) {
    out.push_back(window_[(head_ + i) % window_.size()]);
  }
  return out;
}

std::int64_t TangleState::window_sum() const {
  return std::accumulate(window_.begin(), window_.end(), std::int64_t{0});
}

int TangleState::step(RngStream& rng) {
  const int selected = sample_u(u_distribution(free_, pending_), rng);
  const int oldest = window_[head_];
  window_[head_] = selected;
  head_ = (head_ + 1) % window_.size();
  pending_ += selected - oldest;
  free_ += 1 - selected;
  total_ = free_ + pending_;
  ++n_;
  assert(free_ >= 1);
  // Reconcile the cached pending count against the window once per wrap.
  assert(head_ != 0 || pending_ == window_sum());
  return selected;
}

TraceRow Trace::row(std::size_t i) const {
  return TraceRow{start_n + static_cast<std::int64_t>(i), free_tips[i],
                  pending_tips[i], total_tips[i], u[i]};
}

TangleState init_state(const ModelParams& params, const DiscreteInit& init) {
  return TangleState(params, init);
}

Trace run(const ModelParams& params, const DiscreteInit& init,
          std::int64_t n_steps, RngStream& rng) {
  if (n_steps < 0) {
    throw std::invalid_argument("run: n_steps must be >= 0");
  }
  TangleState state(params, init);
  Trace trace;
  trace.params = params;
  trace.start_n = params.m;
  const auto count = static_cast<std::size_t>(n_steps) + 1;
  trace.free_tips.reserve(count);
  trace.pending_tips.reserve(count);
  trace.total_tips.reserve(count);
  trace.u.reserve(count);

  auto record = [&](int selected) {
    trace.free_tips.push_back(state.free_tips());
    trace.pending_tips.push_back(state.pending_tips());
    trace.total_tips.push_back(state.total_tips());
    trace.u.push_back(selected);
  };
  record(init.u.back());  // row 0 carries U_m from the warm-up
  for (std::int64_t i = 0; i < n_steps; ++i) {
    record(state.step(rng));
  }
  return trace;
}

std::int64_t l_from_init(std::int64_t j, const DiscreteInit& init) {
  const auto m = static_cast<std::int64_t>(init.u.size());
  init.validate(m);
  if (j < 0 || j > m) {
    throw std::out_of_range("l_from_init: j must lie in [0, m]");
  }
  std::int64_t tail = 0;
  for (std::int64_t i = j; i < m; ++i) tail += init.u[static_cast<std::size_t>(i)];
  return init.initial_free + j + tail;
}

}  // namespace tangle
