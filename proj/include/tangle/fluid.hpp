#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace tangle {

// Initial data for the fluid system: the value a(h) and a selection-rate
// profile u on [0, h], piecewise constant on K uniform cells with values in
// [0, 2]. u is pure initial data; it never becomes part of a solution.
struct DdeInit {
  double a_start = 0.0;   // a(h), > 0
  double h = 0.0;         // delay, > 0
  std::vector<double> u;  // K >= 1 cell values

  void validate() const;  // throws std::invalid_argument
  std::size_t cells() const { return u.size(); }
  double cell_width() const { return h / static_cast<double>(u.size()); }

  // Value of the profile at s in [0, h] (right-continuous; the last cell is
  // closed on the right).
  double u_at(double s) const;

  // Integral of the profile over [s0, s1] intersected with [0, h], computed
  // analytically cell by cell. No quadrature error.
  double u_integral(double s0, double s1) const;
};

// b(h) = a(h) + integral of u over [0, h].
double b_initial(const DdeInit& init);

// Closed-form b on the bootstrap interval [h, 2h]:
// b(t) = a(h) + (t - h) + integral of u over [t - h, h].
// Continuous, b(h) = b_initial, b(2h) = a(h) + h.
double bootstrap_b(const DdeInit& init, double t);

// exp(2 * integral of 1/b over [x, y]) by composite Simpson on `panels`
// uniform panels (forced even). Requires x <= y and b > 0 on [x, y];
// throws std::domain_error if b is nonpositive at a sample point.
double integrating_factor(const std::function<double(double)>& b, double x,
                          double y, int panels = 512);

// Variation-of-constants value of a(t) on [h, 2h]:
//   a(t) = (a(h) + integral_h^t P(h,s) ds) / P(h,t),
// with P from the closed-form bootstrap b. Quadrature is composite Simpson
// with panels aligned to the profile's breakpoints, so the integrand is
// smooth on every panel. Serves as an independent check of the stepper.
double bootstrap_a_oracle(const DdeInit& init, double t,
                          int target_panels = 2000);

// Sampled solution (a, b) on the uniform grid t_k = h + k*dt, k = 0..N,
// together with a' for dense cubic-Hermite output. Immutable after
// construction; safe to share read-only across threads.
class FluidSolution {
 public:
  FluidSolution() = default;
  FluidSolution(double h, double dt, std::vector<double> a,
                std::vector<double> b, std::vector<double> da);

  double h() const { return h_; }
  double dt() const { return dt_; }
  std::int64_t steps_per_delay() const { return spi_; }
  std::size_t size() const { return a_.size(); }  // node count N + 1
  double t_begin() const { return h_; }
  double t_end() const { return time_at(a_.size() - 1); }
  double time_at(std::size_t k) const {
    return h_ + static_cast<double>(k) * dt_;
  }

  std::span<const double> a() const { return a_; }
  std::span<const double> b() const { return b_; }
  std::span<const double> da() const { return da_; }

  bool covers(double t) const;

  // Cubic Hermite interpolation of a between grid nodes.
  double a_at(double t) const;

  // b(t) = a(t - h) + h for t >= 2h (same Hermite data); linear between
  // nodes on the bootstrap interval [h, 2h).
  double b_at(double t) const;

 private:
  double h_ = 0.0;
  double dt_ = 0.0;
  std::int64_t spi_ = 0;  // steps per delay interval, h/dt
  std::vector<double> a_, b_, da_;
};

// Method of steps for
//   a'(t) = 1 - 2 a(t)/b(t),   b(t) = a(t - h) + h  (t >= 2h),
// with b on [h, 2h] from bootstrap_b. Integrates a with classical RK4 at
// fixed step dt; the delayed value at half-step stage times comes from cubic
// Hermite interpolation of the already-computed history. dt must divide h so
// the join points jh land on grid nodes; b(t) = a(t-h) + h is written
// exactly at nodes by construction. Requires T >= 2h.
FluidSolution solve(const DdeInit& init, double T, double dt);

// Worst-case residuals of the structural properties a solution must satisfy
// at every grid node t >= 2h.
struct SolutionCheck {
  double h = 0.0;
  double min_a = 0.0;             // positivity: want >= -tol
  double delay_residual = 0.0;    // max |b(t) - h - a(t-h)|: want <= tol
  double min_b = 0.0;             // floor: want >= h - tol
  double balance_residual = 0.0;  // max |b - a - integral of 2a/b over the
                                  // trailing delay window|: want <= tol_quad
  double min_gap = 0.0;           // b - a: want >= -tol
  double max_gap = 0.0;           // b - a: want <= 2h + tol

  bool pass(double tol, double tol_quad) const;
};

// The window integral in balance_residual uses composite Simpson on the
// stored samples (a 3/8 tail absorbs an odd panel count).
SolutionCheck verify_solution(const FluidSolution& sol);

}  // namespace tangle
