#include "tangle/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tangle {

namespace {

double clamp(double v, double lo, double hi) {
  return std::min(std::max(v, lo), hi);
}

// Cubic Hermite on [0,1] with node values p0, p1 and scaled slopes m0, m1
// (already multiplied by the cell width).
double hermite(double p0, double m0, double p1, double m1, double s) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2.0 * s3 - 3.0 * s2 + 1.0) * p0 + (s3 - 2.0 * s2 + s) * m0 +
         (-2.0 * s3 + 3.0 * s2) * p1 + (s3 - s2) * m1;
}

// Hermite value at the cell midpoint; the form RK4 needs for its half-step
// stage times.
double hermite_mid(double p0, double d0, double p1, double d1, double dt) {
  return 0.5 * (p0 + p1) + 0.125 * dt * (d0 - d1);
}

// Composite Simpson over the samples f_0..f_n at spacing dx. An odd panel
// count gets a Simpson 3/8 tail; a single panel falls back to the trapezoid.
double simpson(std::span<const double> f, double dx) {
  const std::size_t n = f.size() - 1;
  if (f.size() < 2) return 0.0;
  if (n == 1) return 0.5 * dx * (f[0] + f[1]);
  const std::size_t body = (n % 2 == 0) ? n : n - 3;
  double total = 0.0;
  if (body >= 2) {
    double s = f[0] + f[body];
    for (std::size_t i = 1; i < body; ++i) s += ((i & 1) ? 4.0 : 2.0) * f[i];
    total += s * dx / 3.0;
  }
  if (n % 2 == 1) {
    total += 3.0 * dx / 8.0 *
             (f[n - 3] + 3.0 * f[n - 2] + 3.0 * f[n - 1] + f[n]);
  }
  return total;
}

std::int64_t steps_per_delay_checked(double h, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const double ratio = h / dt;
  const auto spi = static_cast<std::int64_t>(std::llround(ratio));
  if (spi < 1 ||
      std::fabs(ratio - static_cast<double>(spi)) > 1e-9 * std::max(1.0, ratio)) {
    throw std::invalid_argument("dt must divide h exactly");
  }
  return spi;
}

}  // namespace

void DdeInit::validate() const {
  if (!(h > 0.0)) throw std::invalid_argument("DdeInit: h must be positive");
  if (!(a_start > 0.0)) {
    throw std::invalid_argument("DdeInit: a(h) must be positive");
  }
  if (u.empty()) {
    throw std::invalid_argument("DdeInit: profile needs at least one cell");
  }
  for (double value : u) {
    if (!(value >= 0.0 && value <= 2.0)) {
      throw std::invalid_argument("DdeInit: profile values must lie in [0, 2]");
    }
  }
}

double DdeInit::u_at(double s) const {
  const double w = cell_width();
  const auto k = static_cast<std::size_t>(
      clamp(std::floor(s / w), 0.0, static_cast<double>(u.size() - 1)));
  return u[k];
}

double DdeInit::u_integral(double s0, double s1) const {
  s0 = clamp(s0, 0.0, h);
  s1 = clamp(s1, 0.0, h);
  if (s1 <= s0) return 0.0;
  const double w = cell_width();
  const auto last = static_cast<double>(u.size() - 1);
  const auto k0 = static_cast<std::size_t>(clamp(std::floor(s0 / w), 0.0, last));
  const auto k1 = static_cast<std::size_t>(clamp(std::floor(s1 / w), 0.0, last));
  if (k0 == k1) return (s1 - s0) * u[k0];
  double total = (static_cast<double>(k0 + 1) * w - s0) * u[k0];
  for (std::size_t k = k0 + 1; k < k1; ++k) total += w * u[k];
  total += (s1 - static_cast<double>(k1) * w) * u[k1];
  return total;
}

double b_initial(const DdeInit& init) {
  init.validate();
  return init.a_start + init.u_integral(0.0, init.h);
}

double bootstrap_b(const DdeInit& init, double t) {
  const double h = init.h;
  const double slack = 1e-9 * std::max(1.0, h);
  if (t < h - slack || t > 2.0 * h + slack) {
    throw std::domain_error("bootstrap_b: t must lie in [h, 2h]");
  }
  t = clamp(t, h, 2.0 * h);
  return init.a_start + (t - h) + init.u_integral(t - h, h);
}

double integrating_factor(const std::function<double(double)>& b, double x,
                          double y, int panels) {
  if (!(y >= x)) {
    throw std::invalid_argument("integrating_factor: requires x <= y");
  }
  if (y == x) return 1.0;
  if (panels < 2) panels = 2;
  panels += panels & 1;
  auto reciprocal = [&](double s) {
    const double value = b(s);
    if (!(value > 0.0)) {
      throw std::domain_error("integrating_factor: b must stay positive");
    }
    return 1.0 / value;
  };
  const double dx = (y - x) / panels;
  double sum = reciprocal(x) + reciprocal(y);
  for (int i = 1; i < panels; ++i) {
    sum += ((i & 1) ? 4.0 : 2.0) * reciprocal(x + i * dx);
  }
  return std::exp(2.0 * sum * dx / 3.0);
}

double bootstrap_a_oracle(const DdeInit& init, double t, int target_panels) {
  init.validate();
  const double h = init.h;
  const double slack = 1e-9 * std::max(1.0, h);
  if (t < h - slack || t > 2.0 * h + slack) {
    throw std::domain_error("bootstrap_a_oracle: t must lie in [h, 2h]");
  }
  t = clamp(t, h, 2.0 * h);
  if (t <= h) return init.a_start;
  if (target_panels < 8) target_panels = 8;

  // b is piecewise linear with kinks at the profile breakpoints shifted by
  // h; integrating piece by piece keeps Simpson at full order.
  std::vector<double> cuts{h};
  const double w = init.cell_width();
  for (std::size_t k = 1; k < init.cells(); ++k) {
    const double s = h + static_cast<double>(k) * w;
    if (s > h && s < t) cuts.push_back(s);
  }
  cuts.push_back(t);

  const double delta = (t - h) / target_panels;
  double log_factor = 0.0;  // integral of 1/b from h
  double weighted = 0.0;    // integral of P(h, s) from h
  for (std::size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
    const double lo = cuts[piece];
    const double hi = cuts[piece + 1];
    auto panels = static_cast<int>(std::ceil((hi - lo) / delta));
    panels = std::max(panels, 2);
    panels += panels & 1;
    const double dx = (hi - lo) / panels;

    std::vector<double> p_nodes(static_cast<std::size_t>(panels) + 1);
    p_nodes[0] = std::exp(2.0 * log_factor);
    double f_prev = 1.0 / bootstrap_b(init, lo);
    double log_local = log_factor;
    for (int i = 0; i < panels; ++i) {
      const double s0 = lo + i * dx;
      const double f_mid = 1.0 / bootstrap_b(init, s0 + 0.5 * dx);
      const double f_next = 1.0 / bootstrap_b(init, s0 + dx);
      log_local += dx / 6.0 * (f_prev + 4.0 * f_mid + f_next);
      p_nodes[static_cast<std::size_t>(i) + 1] = std::exp(2.0 * log_local);
      f_prev = f_next;
    }
    weighted += simpson(p_nodes, dx);
    log_factor = log_local;
  }
  return (init.a_start + weighted) * std::exp(-2.0 * log_factor);
}

FluidSolution::FluidSolution(double h, double dt, std::vector<double> a,
                             std::vector<double> b, std::vector<double> da)
    : h_(h), dt_(dt), a_(std::move(a)), b_(std::move(b)), da_(std::move(da)) {
  spi_ = steps_per_delay_checked(h, dt);
  if (a_.size() != b_.size() || a_.size() != da_.size() ||
      a_.size() < static_cast<std::size_t>(spi_) + 1) {
    throw std::invalid_argument(
        "FluidSolution: samples must agree in size and cover [h, 2h]");
  }
}

bool FluidSolution::covers(double t) const {
  const double slack = 1e-9 * std::max(1.0, h_);
  return t >= h_ - slack && t <= t_end() + slack;
}

double FluidSolution::a_at(double t) const {
  if (!covers(t)) throw std::out_of_range("FluidSolution: t outside [h, T]");
  const auto last = static_cast<double>(a_.size() - 2);
  const double pos = clamp((t - h_) / dt_, 0.0, last + 1.0);
  const auto k = static_cast<std::size_t>(clamp(std::floor(pos), 0.0, last));
  const double s = clamp(pos - static_cast<double>(k), 0.0, 1.0);
  return hermite(a_[k], da_[k] * dt_, a_[k + 1], da_[k + 1] * dt_, s);
}

double FluidSolution::b_at(double t) const {
  if (!covers(t)) throw std::out_of_range("FluidSolution: t outside [h, T]");
  const double two_h = 2.0 * h_;
  if (t >= two_h - 1e-9 * h_) {
    return a_at(std::max(t - h_, h_)) + h_;
  }
  // Bootstrap window: b is piecewise linear, so linear node interpolation.
  const auto last = static_cast<double>(spi_ - 1);
  const double pos = clamp((t - h_) / dt_, 0.0, static_cast<double>(spi_));
  const auto k = static_cast<std::size_t>(clamp(std::floor(pos), 0.0, last));
  const double s = clamp(pos - static_cast<double>(k), 0.0, 1.0);
  return (1.0 - s) * b_[k] + s * b_[k + 1];
}

FluidSolution solve(const DdeInit& init, double T, double dt) {
  init.validate();
  const double h = init.h;
  const std::int64_t spi = steps_per_delay_checked(h, dt);
  if (T < 2.0 * h - 1e-9 * h) {
    throw std::invalid_argument("solve: T must be at least 2h");
  }
  dt = h / static_cast<double>(spi);
  const auto n_steps = std::max<std::int64_t>(
      spi, static_cast<std::int64_t>(std::ceil((T - h) / dt - 1e-9)));
  const auto count = static_cast<std::size_t>(n_steps) + 1;

  std::vector<double> a(count), b(count), da(count);
  auto slope = [](double av, double bv) { return 1.0 - 2.0 * av / bv; };

  // Bootstrap interval [h, 2h]: b is closed-form, a integrates against it.
  for (std::int64_t k = 0; k <= spi; ++k) {
    b[static_cast<std::size_t>(k)] =
        bootstrap_b(init, h + static_cast<double>(k) * dt);
  }
  a[0] = init.a_start;
  da[0] = slope(a[0], b[0]);
  for (std::int64_t k = 0; k < spi; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const double t = h + static_cast<double>(k) * dt;
    const double b_mid = bootstrap_b(init, std::min(t + 0.5 * dt, 2.0 * h));
    const double k1 = slope(a[i], b[i]);
    const double k2 = slope(a[i] + 0.5 * dt * k1, b_mid);
    const double k3 = slope(a[i] + 0.5 * dt * k2, b_mid);
    const double k4 = slope(a[i] + dt * k3, b[i + 1]);
    a[i + 1] = a[i] + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    da[i + 1] = slope(a[i + 1], b[i + 1]);
  }

  // Method of steps: the delayed total is the stored history shifted by one
  // delay, interpolated at half-step stage times.
  for (std::int64_t k = spi; k < n_steps; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const auto j = static_cast<std::size_t>(k - spi);
    const double a_mid = hermite_mid(a[j], da[j], a[j + 1], da[j + 1], dt);
    const double b_mid = a_mid + h;
    const double b_end = a[j + 1] + h;
    const double k1 = slope(a[i], b[i]);
    const double k2 = slope(a[i] + 0.5 * dt * k1, b_mid);
    const double k3 = slope(a[i] + 0.5 * dt * k2, b_mid);
    const double k4 = slope(a[i] + dt * k3, b_end);
    a[i + 1] = a[i] + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    b[i + 1] = a[j + 1] + h;
    da[i + 1] = slope(a[i + 1], b[i + 1]);
  }

  return FluidSolution(h, dt, std::move(a), std::move(b), std::move(da));
}

bool SolutionCheck::pass(double tol, double tol_quad) const {
  return min_a >= -tol && delay_residual <= tol && min_b >= h - tol &&
         balance_residual <= tol_quad && min_gap >= -tol &&
         max_gap <= 2.0 * h + tol;
}

SolutionCheck verify_solution(const FluidSolution& sol) {
  const auto a = sol.a();
  const auto b = sol.b();
  const auto spi = static_cast<std::size_t>(sol.steps_per_delay());
  const std::size_t count = sol.size();

  SolutionCheck check;
  check.h = sol.h();
  check.min_a = a[spi];
  check.min_b = b[spi];
  check.min_gap = b[spi] - a[spi];
  check.max_gap = check.min_gap;

  std::vector<double> flux(count);
  for (std::size_t k = 0; k < count; ++k) flux[k] = 2.0 * a[k] / b[k];

  for (std::size_t k = spi; k < count; ++k) {
    check.min_a = std::min(check.min_a, a[k]);
    check.min_b = std::min(check.min_b, b[k]);
    const double gap = b[k] - a[k];
    check.min_gap = std::min(check.min_gap, gap);
    check.max_gap = std::max(check.max_gap, gap);
    check.delay_residual = std::max(
        check.delay_residual, std::fabs(b[k] - sol.h() - a[k - spi]));
    const double window = simpson(
        std::span<const double>(flux).subspan(k - spi, spi + 1), sol.dt());
    check.balance_residual =
        std::max(check.balance_residual, std::fabs(gap - window));
  }
  return check;
}

}  // namespace tangle
