#pragma once

// Time integrators for the Fourier-Galerkin system
//   i û'_k + m_k û_k = α w_k Ĉ_k,   Ĉ = coefficients of |u|²u.
//
// cnab2: Crank-Nicolson on the linear part, two-step Adams-Bashforth on the
//        nonlinear forcing. Started by one CN step with frozen forcing.
// etd2:  exponential time differencing (Cox-Matthews ETD2), started by one
//        exponential Euler step.
// picard_solve: fixed-point iteration on the mild form
//        u(t) = 𝒯(t)u0 + ∫₀ᵗ 𝒯(t-ξ)F(u(ξ))dξ with trapezoid quadrature.

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "dnls/error.hpp"
#include "dnls/model.hpp"
#include "dnls/spectral_core.hpp"

namespace dnls {

enum class Scheme { cnab2, etd2 };

inline std::string_view to_string(Scheme s) {
  return s == Scheme::cnab2 ? "cnab2" : "etd2";
}

inline Scheme parse_scheme(std::string_view name) {
  if (name == "cnab2") return Scheme::cnab2;
  if (name == "etd2") return Scheme::etd2;
  throw InvalidInput("unknown scheme '" + std::string(name) + "' (expected cnab2 or etd2)");
}

/// Everything a two-step scheme carries from step n to n+1.
struct StepperState {
  Scheme scheme = Scheme::cnab2;
  Dealias dealias = Dealias::pad2;
  std::size_t step = 0;
  double dt = 0.0;
  SpectralField current;         ///< û^n
  SpectralField previous_cubic;  ///< Ĉ^{n-1}
  // Per-mode update factors, fixed for the lifetime of a run.
  //   cnab2: û^{n+1} = a·û^n + b·(3/2 G^n - 1/2 G^{n-1}),  G = α w Ĉ
  //   etd2:  û^{n+1} = a·û^n + b·G^n + c·G^{n-1},          G = -iα w Ĉ
  std::vector<Complex> a, b, c;

  double time() const noexcept { return static_cast<double>(step) * dt; }
};

namespace detail {

// φ₁(z) = (e^z - 1)/z and φ₂(z) = (e^z - 1 - z)/z², by Taylor series near 0.
inline Complex phi1(Complex z) {
  if (std::abs(z) < 1e-2) {
    Complex term = 1.0, sum = 0.0;
    for (int j = 1; j <= 8; ++j) {
      sum += term;
      term *= z / static_cast<double>(j + 1);
    }
    return sum;
  }
  return (std::exp(z) - 1.0) / z;
}

inline Complex phi2(Complex z) {
  if (std::abs(z) < 1e-2) {
    Complex term = 0.5, sum = 0.0;
    for (int j = 2; j <= 9; ++j) {
      sum += term;
      term *= z / static_cast<double>(j + 1);
    }
    return sum;
  }
  return (std::exp(z) - 1.0 - z) / (z * z);
}

inline void check_finite(const StepperState& s) {
  if (!s.current.all_finite())
    throw BlowUpError("non-finite coefficients at step " + std::to_string(s.step) + " (t = " +
                          std::to_string(s.time()) + ")",
                      s.step);
}

inline void require_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("time step must be finite and > 0");
}

inline SpectralField cubic_or_zero(const ModelParams& p, const SpectralField& u, Dealias mode) {
  return p.alpha == 0.0 ? SpectralField(u.grid()) : cubic(u, mode);
}

inline void require_grid(const StepperState& s, const PeriodicGrid& grid) {
  if (!(s.current.grid() == grid)) throw InvalidInput("stepper: state lives on a different grid");
}

}  // namespace detail

/// First step of cnab2: one Crank-Nicolson step with the forcing frozen at t = 0.
inline StepperState cnab2_bootstrap(const ModelParams& params, const PeriodicGrid& grid,
                                    const SpectralField& u0, double dt,
                                    Dealias dealias = Dealias::pad2) {
  params.validate();
  detail::require_dt(dt);
  if (!(u0.grid() == grid)) throw InvalidInput("cnab2_bootstrap: u0 lives on a different grid");

  const std::size_t n = grid.size();
  StepperState s{Scheme::cnab2, dealias, 0, dt, u0, SpectralField(grid), {}, {}, {}};
  s.a.resize(n);
  s.b.resize(n);
  const Complex i_over_dt(0.0, 1.0 / dt);
  for (std::size_t i = 0; i < n; ++i) {
    const Complex half_m = 0.5 * semidiscrete_coefficient(params, grid.wavenumber(i));
    const Complex denom = i_over_dt + half_m;
    s.a[i] = (i_over_dt - half_m) / denom;
    s.b[i] = 1.0 / denom;
  }

  const auto c0 = detail::cubic_or_zero(params, u0, dealias);
  for (std::size_t i = 0; i < n; ++i)
    s.current[i] = s.a[i] * u0[i] + s.b[i] * (params.alpha * grid.wavenumber(i) * c0[i]);
  s.previous_cubic = c0;
  s.step = 1;
  detail::check_finite(s);
  return s;
}

/// û^{n+1}_k = [(i/Δt - m_k/2) û^n_k + α w_k(3/2 Ĉ^n_k - 1/2 Ĉ^{n-1}_k)] / (i/Δt + m_k/2).
inline StepperState cnab2_step(StepperState s, const ModelParams& params,
                               const PeriodicGrid& grid) {
  detail::require_grid(s, grid);
  const auto cn = detail::cubic_or_zero(params, s.current, s.dealias);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Complex forcing =
        params.alpha * grid.wavenumber(i) * (1.5 * cn[i] - 0.5 * s.previous_cubic[i]);
    s.current[i] = s.a[i] * s.current[i] + s.b[i] * forcing;
  }
  s.previous_cubic = cn;
  ++s.step;
  detail::check_finite(s);
  return s;
}

/// First step of etd2: exponential Euler, û¹ = e^{σΔt}û⁰ + Δt φ₁(σΔt) F̂(u⁰).
inline StepperState etd2_bootstrap(const ModelParams& params, const PeriodicGrid& grid,
                                   const SpectralField& u0, double dt,
                                   Dealias dealias = Dealias::pad2) {
  params.validate();
  detail::require_dt(dt);
  if (!(u0.grid() == grid)) throw InvalidInput("etd2_bootstrap: u0 lives on a different grid");

  const std::size_t n = grid.size();
  const LinearSymbol sigma(params, grid);
  StepperState s{Scheme::etd2, dealias, 0, dt, u0, SpectralField(grid), {}, {}, {}};
  s.a.resize(n);
  s.b.resize(n);
  s.c.resize(n);
  std::vector<Complex> euler(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Complex z = sigma[i] * dt;
    const Complex p1 = detail::phi1(z);
    const Complex p2 = detail::phi2(z);
    s.a[i] = std::exp(z);
    s.b[i] = dt * (p1 + p2);
    s.c[i] = -dt * p2;
    euler[i] = dt * p1;
  }

  const auto c0 = detail::cubic_or_zero(params, u0, dealias);
  for (std::size_t i = 0; i < n; ++i) {
    const Complex g = Complex(0.0, -params.alpha * grid.wavenumber(i)) * c0[i];
    s.current[i] = s.a[i] * u0[i] + euler[i] * g;
  }
  s.previous_cubic = c0;
  s.step = 1;
  detail::check_finite(s);
  return s;
}

/// û^{n+1} = e^{σΔt}û^n + Δt[(φ₁+φ₂)F̂^n - φ₂F̂^{n-1}].
inline StepperState etd2_step(StepperState s, const ModelParams& params,
                              const PeriodicGrid& grid) {
  detail::require_grid(s, grid);
  const auto cn = detail::cubic_or_zero(params, s.current, s.dealias);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Complex minus_i_alpha_w(0.0, -params.alpha * grid.wavenumber(i));
    s.current[i] = s.a[i] * s.current[i] +
                   minus_i_alpha_w * (s.b[i] * cn[i] + s.c[i] * s.previous_cubic[i]);
  }
  s.previous_cubic = cn;
  ++s.step;
  detail::check_finite(s);
  return s;
}

inline StepperState bootstrap(Scheme scheme, const ModelParams& params, const SpectralField& u0,
                              double dt, Dealias dealias = Dealias::pad2) {
  return scheme == Scheme::cnab2 ? cnab2_bootstrap(params, u0.grid(), u0, dt, dealias)
                                 : etd2_bootstrap(params, u0.grid(), u0, dt, dealias);
}

inline StepperState advance(StepperState s, const ModelParams& params) {
  const PeriodicGrid grid = s.current.grid();
  return s.scheme == Scheme::cnab2 ? cnab2_step(std::move(s), params, grid)
                                   : etd2_step(std::move(s), params, grid);
}

/// Integrates u0 over `steps` steps of size dt and returns the terminal field.
inline SpectralField integrate(Scheme scheme, const ModelParams& params, const SpectralField& u0,
                               double dt, std::size_t steps, Dealias dealias = Dealias::pad2) {
  if (steps == 0) return u0;
  auto s = bootstrap(scheme, params, u0, dt, dealias);
  while (s.step < steps) s = advance(std::move(s), params);
  return s.current;
}

struct RunMetadata {
  ModelParams params;
  PeriodicGrid grid;
  double dt = 0.0;
  std::string scheme;
};

/// Snapshots of one run on a single grid at strictly increasing times.
class Trajectory {
 public:
  explicit Trajectory(RunMetadata meta) : meta_(std::move(meta)) {}

  void append(double t, SpectralField u) {
    if (!(u.grid() == meta_.grid)) throw InvalidInput("Trajectory: snapshot grid mismatch");
    if (!times_.empty() && !(t > times_.back()))
      throw InvalidInput("Trajectory: snapshot times must be strictly increasing");
    times_.push_back(t);
    snapshots_.push_back(std::move(u));
  }

  const RunMetadata& metadata() const noexcept { return meta_; }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<SpectralField>& snapshots() const noexcept { return snapshots_; }
  std::size_t size() const noexcept { return times_.size(); }
  const SpectralField& back() const { return snapshots_.back(); }

 private:
  RunMetadata meta_;
  std::vector<double> times_;
  std::vector<SpectralField> snapshots_;
};

struct PicardResult {
  Trajectory trajectory;
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// Solves the mild form on `nodes` uniform time nodes t_i = i·T/(nodes-1),
/// iterating until sup_i ‖u^{(m+1)}(t_i) - u^{(m)}(t_i)‖₀ <= tol.
/// Throws NoContraction after `max_iter` iterations without convergence.
inline PicardResult picard_solve(const ModelParams& params, const PeriodicGrid& grid,
                                 const SpectralField& u0, double horizon, std::size_t nodes,
                                 double tol, std::size_t max_iter,
                                 Dealias dealias = Dealias::pad2) {
  params.validate();
  if (!(horizon > 0.0)) throw InvalidInput("picard_solve: horizon must be > 0");
  if (nodes < 2) throw InvalidInput("picard_solve: need at least 2 time nodes");
  if (!(tol > 0.0)) throw InvalidInput("picard_solve: tol must be > 0");
  if (!(u0.grid() == grid)) throw InvalidInput("picard_solve: u0 lives on a different grid");

  const std::size_t n = grid.size();
  const double h = horizon / static_cast<double>(nodes - 1);
  const LinearSymbol sigma(params, grid);

  // propagator[l][i] = exp(σ_i · l·h)
  std::vector<std::vector<Complex>> propagator(nodes, std::vector<Complex>(n));
  for (std::size_t l = 0; l < nodes; ++l)
    for (std::size_t i = 0; i < n; ++i)
      propagator[l][i] = std::exp(sigma[i] * (static_cast<double>(l) * h));

  auto free_flow = [&](std::size_t l) {
    SpectralField out = u0;
    for (std::size_t i = 0; i < n; ++i) out[i] *= propagator[l][i];
    return out;
  };

  std::vector<SpectralField> iterate;
  iterate.reserve(nodes);
  for (std::size_t l = 0; l < nodes; ++l) iterate.push_back(free_flow(l));

  double residual = 0.0;
  for (std::size_t m = 1; m <= max_iter; ++m) {
    std::vector<SpectralField> forcing;
    forcing.reserve(nodes);
    for (const auto& u : iterate) forcing.push_back(nonlinear_term(params, u, dealias));

    std::vector<SpectralField> next;
    next.reserve(nodes);
    residual = 0.0;
    for (std::size_t l = 0; l < nodes; ++l) {
      SpectralField u = free_flow(l);
      for (std::size_t j = 0; j <= l && l > 0; ++j) {
        const double weight = (j == 0 || j == l) ? 0.5 * h : h;
        const auto& e = propagator[l - j];
        const auto& f = forcing[j];
        for (std::size_t i = 0; i < n; ++i) u[i] += weight * e[i] * f[i];
      }
      residual = std::max(residual, l2_norm(u - iterate[l]));
      next.push_back(std::move(u));
    }
    iterate = std::move(next);
    if (!std::isfinite(residual))
      throw NoContraction("picard_solve: iterates diverged", m, residual);
    if (residual <= tol) {
      Trajectory traj(RunMetadata{params, grid, h, "picard"});
      for (std::size_t l = 0; l < nodes; ++l)
        traj.append(static_cast<double>(l) * h, std::move(iterate[l]));
      return {std::move(traj), m, residual};
    }
  }
  throw NoContraction("picard_solve: no convergence after " + std::to_string(max_iter) +
                          " iterations (residual " + std::to_string(residual) +
                          "); shorten the horizon",
                      max_iter, residual);
}

}  // namespace dnls
