#include "tangle/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace tangle {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Type-7 quantile (linear interpolation) on a sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return kNaN;
  if (sorted.size() == 1) return sorted[0];
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto k = static_cast<std::size_t>(std::floor(pos));
  if (k + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(k);
  return sorted[k] * (1.0 - frac) + sorted[k + 1] * frac;
}

double ols_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) {
    throw std::invalid_argument("fit: abscissae must not be all equal");
  }
  return sxy / sxx;
}

}  // namespace

double sup_deviation(const RescaledTrace& rt, const FluidSolution& sol,
                     double t_lo, double t_hi, Channel ch) {
  if (!(t_hi >= t_lo)) {
    throw std::invalid_argument("sup_deviation: empty window");
  }
  if (!rt.covers(t_lo) || !rt.covers(t_hi) || !sol.covers(t_lo) ||
      !sol.covers(t_hi)) {
    throw std::invalid_argument("sup_deviation: window not covered");
  }
  const double lambda = rt.lambda();
  double worst = 0.0;

  // Arrival times inside the window.
  const auto n_lo = std::max<std::int64_t>(
      rt.start_n(), static_cast<std::int64_t>(std::ceil(t_lo * lambda - 1e-9)));
  const auto n_hi = std::min<std::int64_t>(
      rt.start_n() + static_cast<std::int64_t>(rt.size()) - 1,
      static_cast<std::int64_t>(std::floor(t_hi * lambda + 1e-9)));
  for (std::int64_t n = n_lo; n <= n_hi; ++n) {
    const auto i = static_cast<std::size_t>(n - rt.start_n());
    const double t = rt.time_at(i);
    const double step_val =
        ch == Channel::free_tips ? rt.a_value(i) : rt.b_value(i);
    const double fluid_val =
        ch == Channel::free_tips ? sol.a_at(t) : sol.b_at(t);
    worst = std::max(worst, std::fabs(step_val - fluid_val));
  }

  // Solver grid nodes inside the window.
  const auto k_lo = std::max<std::int64_t>(
      0, static_cast<std::int64_t>(std::ceil((t_lo - sol.h()) / sol.dt() - 1e-9)));
  const auto k_hi = std::min<std::int64_t>(
      static_cast<std::int64_t>(sol.size()) - 1,
      static_cast<std::int64_t>(std::floor((t_hi - sol.h()) / sol.dt() + 1e-9)));
  for (std::int64_t k = k_lo; k <= k_hi; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const double t = sol.time_at(i);
    const double step_val = ch == Channel::free_tips ? rt.a_at(t) : rt.b_at(t);
    const double fluid_val =
        ch == Channel::free_tips ? sol.a()[i] : sol.b()[i];
    worst = std::max(worst, std::fabs(step_val - fluid_val));
  }
  return worst;
}

ReplicaRun simulate_replica(const DdeInit& init, double lambda, double horizon,
                            int max_tries, RngStream& rng) {
  const ModelParams params = ModelParams::create(lambda, init.h);
  if (!(horizon >= 2.0 * init.h)) {
    throw std::invalid_argument("simulate_replica: horizon must be >= 2h");
  }
  AdmissibleSample sample = sample_admissible(init, lambda, rng, max_tries);
  const CouplingTargets t = targets(init, lambda);
  DiscreteInit dinit{t.initial_free, std::move(sample.v)};
  const auto n_total =
      static_cast<std::int64_t>(std::ceil(lambda * horizon - 1e-9));
  const auto n_steps = std::max<std::int64_t>(0, n_total - params.m);
  Trace trace = run(params, dinit, n_steps, rng);
  return ReplicaRun{std::move(dinit), sample.tries, std::move(trace)};
}

SweepReport lambda_sweep(const DdeInit& init, const SweepConfig& cfg) {
  init.validate();
  if (cfg.lambdas.empty()) {
    throw std::invalid_argument("lambda_sweep: need at least one lambda");
  }
  if (cfg.replicas < 1) {
    throw std::invalid_argument("lambda_sweep: replicas must be >= 1");
  }
  for (double lambda : cfg.lambdas) {
    ModelParams::create(lambda, init.h);  // validates lambda*h up front
  }
  const double h = init.h;
  const double dt = cfg.dt > 0.0 ? cfg.dt : h / 1000.0;
  const FluidSolution sol = solve(init, cfg.horizon, dt);

  SweepReport report;
  report.config = cfg;
  const std::size_t tasks = cfg.lambdas.size() * static_cast<std::size_t>(cfg.replicas);
  report.records.resize(tasks);

  auto run_task = [&](std::size_t idx) {
    const std::size_t li = idx / static_cast<std::size_t>(cfg.replicas);
    const int replica = static_cast<int>(idx % static_cast<std::size_t>(cfg.replicas));
    const double lambda = cfg.lambdas[li];
    const std::uint64_t stream_id =
        (static_cast<std::uint64_t>(li) << 32) | static_cast<std::uint64_t>(replica);
    const std::uint64_t seed = RngStream::derive_seed(cfg.base_seed, stream_id);
    DeviationRecord rec;
    rec.lambda = lambda;
    rec.replica = replica;
    rec.seed = seed;
    try {
      RngStream rng(seed);
      ReplicaRun rr =
          simulate_replica(init, lambda, cfg.horizon, cfg.max_tries, rng);
      const RescaledTrace rt = rescale(rr.trace, lambda);
      rec.tries = rr.tries;
      rec.sup_dev_a =
          sup_deviation(rt, sol, h, cfg.horizon, Channel::free_tips);
      rec.sup_dev_b =
          sup_deviation(rt, sol, 2.0 * h, cfg.horizon, Channel::total_tips);
      rec.ok = true;
    } catch (const std::runtime_error&) {
      rec.tries = cfg.max_tries;
      rec.sup_dev_a = kNaN;
      rec.sup_dev_b = kNaN;
      rec.ok = false;
    }
    report.records[idx] = rec;
  };

  const int workers = std::clamp<int>(cfg.workers, 1, static_cast<int>(tasks));
  if (workers <= 1) {
    for (std::size_t idx = 0; idx < tasks; ++idx) run_task(idx);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t idx = next.fetch_add(1); idx < tasks;
             idx = next.fetch_add(1)) {
          run_task(idx);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // Deterministic fold, ordered by (lambda index, replica).
  for (std::size_t li = 0; li < cfg.lambdas.size(); ++li) {
    SweepSummary row;
    row.lambda = cfg.lambdas[li];
    std::vector<double> devs;
    for (int r = 0; r < cfg.replicas; ++r) {
      const auto& rec =
          report.records[li * static_cast<std::size_t>(cfg.replicas) +
                         static_cast<std::size_t>(r)];
      if (rec.ok) {
        devs.push_back(rec.sup_dev_a);
      } else {
        ++row.n_skipped;
      }
    }
    row.n_ok = static_cast<int>(devs.size());
    std::sort(devs.begin(), devs.end());
    row.median_a = quantile_sorted(devs, 0.5);
    row.q75_a = quantile_sorted(devs, 0.75);
    report.summary.push_back(row);
  }

  std::vector<std::pair<double, double>> pts;
  for (const auto& row : report.summary) {
    if (row.n_ok > 0 && row.median_a > 0.0) {
      pts.emplace_back(row.lambda, row.median_a);
    }
  }
  try {
    report.slope = fit_slope(pts);
  } catch (const std::invalid_argument&) {
    report.slope = kNaN;
  }
  return report;
}

double fit_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) {
    throw std::invalid_argument("fit_slope: need at least two points");
  }
  std::vector<double> xs, ys;
  xs.reserve(points.size());
  ys.reserve(points.size());
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) {
      throw std::invalid_argument("fit_slope: values must be positive");
    }
    xs.push_back(std::log(x));
    ys.push_back(std::log(y));
  }
  return ols_slope(xs, ys);
}

DecayConstants decay_constants(const DdeInit& init, const FluidSolution& sol) {
  init.validate();
  const double h = sol.h();
  if (std::fabs(h - init.h) > 1e-12 * std::max(1.0, init.h)) {
    throw std::invalid_argument("decay_constants: solution does not match init");
  }
  DecayConstants out;
  const auto spi = static_cast<std::size_t>(sol.steps_per_delay());
  for (std::size_t k = 0; k <= spi; ++k) {
    out.amplitude = std::max(out.amplitude, std::fabs(sol.a()[k] - h));
  }
  out.contraction =
      std::max(0.75, std::exp(-h / (3.0 * (out.amplitude / 2.0 + h))));
  out.rate = -std::log(out.contraction) / (2.0 * h);
  return out;
}

DecayReport decay_check(const DdeInit& init, const FluidSolution& sol,
                        double horizon, double tol) {
  const double h = sol.h();
  if (!(horizon >= 5.0 * h)) {
    throw std::invalid_argument("decay_check: horizon must be >= 5h");
  }
  if (!sol.covers(horizon - 1e-9 * h)) {
    throw std::invalid_argument("decay_check: solution does not reach horizon");
  }
  DecayReport rep;
  rep.constants = decay_constants(init, sol);
  const double amp =
      rep.constants.amplitude * std::pow(rep.constants.contraction, -1.5);

  const auto spi = static_cast<std::size_t>(sol.steps_per_delay());
  const auto k_lo = static_cast<std::size_t>(
      std::ceil((4.0 * h - h) / sol.dt() - 1e-9));
  const auto k_fit_hi = std::min<std::size_t>(
      sol.size() - 1,
      static_cast<std::size_t>(std::floor((horizon - h) / sol.dt() + 1e-9)));
  const std::size_t k_hi = k_fit_hi >= spi ? k_fit_hi - spi : 0;

  rep.worst_margin = -std::numeric_limits<double>::infinity();
  rep.delay_ok = true;
  for (std::size_t k = k_lo; k <= k_hi; ++k) {
    const double t = sol.time_at(k);
    const double dev = std::fabs(sol.a()[k] - h);
    const double bound = amp * std::exp(-rep.constants.rate * t);
    rep.rows.push_back(DecayRow{t, dev, bound});
    rep.worst_margin = std::max(rep.worst_margin, dev - bound);
    // The delayed total one window ahead is written from this node verbatim.
    if (sol.b()[k + spi] != sol.a()[k] + h) rep.delay_ok = false;
  }
  rep.bound_ok = rep.worst_margin <= tol;

  std::vector<double> ts, logs;
  for (std::size_t k = k_lo; k <= k_fit_hi; ++k) {
    const double dev = std::fabs(sol.a()[k] - h);
    if (dev > 1e-12) {
      ts.push_back(sol.time_at(k));
      logs.push_back(std::log(dev));
    }
  }
  if (ts.size() >= 2) {
    rep.fitted_rate = -ols_slope(ts, logs);
    rep.rate_ok = rep.constants.amplitude <= 1e-6 ||
                  rep.fitted_rate >= rep.constants.rate - 0.01 / h;
  } else {
    // Everything already at the stationary point within the noise floor.
    rep.fitted_rate = kNaN;
    rep.rate_ok = true;
  }
  return rep;
}

}  // namespace tangle
