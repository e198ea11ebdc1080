#pragma once

// Refinement ladders, linear validation and vanishing-parameter sweeps.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dnls/error.hpp"
#include "dnls/model.hpp"
#include "dnls/spectral_core.hpp"
#include "dnls/steppers.hpp"

namespace dnls {

enum class Protocol { run, validate_linear, converge_time, converge_space, limit_sweep };

inline std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::run: return "run";
    case Protocol::validate_linear: return "validate-linear";
    case Protocol::converge_time: return "converge-time";
    case Protocol::converge_space: return "converge-space";
    case Protocol::limit_sweep: return "limit-sweep";
  }
  return "run";
}

inline std::optional<Protocol> parse_protocol(std::string_view name) {
  for (auto p : {Protocol::run, Protocol::validate_linear, Protocol::converge_time,
                 Protocol::converge_space, Protocol::limit_sweep})
    if (to_string(p) == name) return p;
  return std::nullopt;
}

inline std::string_view to_string(Dealias d) { return d == Dealias::pad2 ? "pad2" : "none"; }

/// Named initial profile: gaussian is exp(-((x - center)/width)²).
struct InitialProfile {
  std::string type = "gaussian";
  double center = 0.0;
  double width = 1.0;

  Complex operator()(double x) const {
    if (type == "zero") return 0.0;
    const double r = (x - center) / width;
    return std::exp(-r * r);
  }

  friend bool operator==(const InitialProfile&, const InitialProfile&) = default;
};

/// Parameter swept by limit_sweep.
enum class SweepParameter { eta, beta };

inline std::string_view to_string(SweepParameter p) { return p == SweepParameter::eta ? "eta" : "beta"; }

inline std::optional<SweepParameter> parse_sweep_parameter(std::string_view name) {
  if (name == "eta") return SweepParameter::eta;
  if (name == "beta") return SweepParameter::beta;
  return std::nullopt;
}

struct SweepSpec {
  SweepParameter parameter = SweepParameter::eta;
  std::vector<double> values;  ///< strictly decreasing, >= 0
  double reference = 0.0;      ///< value every run is compared against

  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

struct ExperimentConfig {
  ModelParams params;
  double length = 0.0;
  std::size_t points = 0;
  InitialProfile u0;
  double dt = 0.0;
  double final_time = 0.0;
  std::size_t snapshots = 10;
  Scheme scheme = Scheme::cnab2;
  Protocol protocol = Protocol::run;
  Dealias dealias = Dealias::pad2;
  std::size_t levels = 5;
  /// First step of the converge-time ladder; T/2 when unset.
  std::optional<double> coarsest_dt;
  std::optional<SweepSpec> sweep;

  PeriodicGrid grid() const { return PeriodicGrid(length, points); }

  std::size_t steps() const {
    return static_cast<std::size_t>(std::llround(final_time / dt));
  }

  /// Throws InvalidInput naming the first violated invariant.
  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

namespace detail {

inline std::size_t steps_for(double horizon, double dt, const char* what) {
  const double ratio = horizon / dt;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
    throw InvalidInput(std::string(what) + ": T must be an integer multiple of dt");
  return static_cast<std::size_t>(n);
}

inline void check_sweep_values(std::span<const double> values) {
  if (values.empty()) throw InvalidInput("sweep: values must not be empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0)
      throw InvalidInput("sweep: values must be finite and >= 0");
    if (i > 0 && !(values[i] < values[i - 1]))
      throw InvalidInput("sweep: values must be strictly decreasing");
  }
}

}  // namespace detail

inline void ExperimentConfig::validate() const {
  params.validate();
  (void)grid();
  if (!(final_time > 0.0) || !std::isfinite(final_time)) throw InvalidInput("T must be > 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("dt must be > 0");
  if (dt > final_time) throw InvalidInput("dt exceeds T");
  detail::steps_for(final_time, dt, "config");
  if (snapshots < 1) throw InvalidInput("snapshots must be >= 1");
  if (u0.type != "gaussian" && u0.type != "zero")
    throw InvalidInput("u0.type must be 'gaussian' or 'zero'");
  if (!(u0.width > 0.0) || !std::isfinite(u0.width) || !std::isfinite(u0.center))
    throw InvalidInput("u0 requires finite center and width > 0");
  if (coarsest_dt && (!(*coarsest_dt > 0.0) || *coarsest_dt > final_time))
    throw InvalidInput("coarsest_dt must lie in (0, T]");
  if (sweep) {
    detail::check_sweep_values(sweep->values);
    if (!(sweep->reference >= 0.0) || !std::isfinite(sweep->reference))
      throw InvalidInput("sweep: reference must be finite and >= 0");
  }
}

inline SpectralField initial_field(const ExperimentConfig& cfg) {
  return project(cfg.grid(), cfg.u0);
}

/// Steps a config to T, recording the initial state and `snapshots` uniform
/// snapshots ending at T.
inline Trajectory run_simulation(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto grid = cfg.grid();
  const std::size_t total = cfg.steps();
  const std::size_t count = std::min(cfg.snapshots, total);

  Trajectory traj(RunMetadata{cfg.params, grid, cfg.dt, std::string(to_string(cfg.scheme))});
  auto u0 = initial_field(cfg);
  traj.append(0.0, u0);

  try {
    auto state = bootstrap(cfg.scheme, cfg.params, u0, cfg.dt, cfg.dealias);
    for (std::size_t m = 1; m <= count; ++m) {
      const std::size_t target = (m * total) / count;
      while (state.step < target) state = advance(std::move(state), cfg.params);
      traj.append(static_cast<double>(target) * cfg.dt, state.current);
    }
  } catch (const BlowUpError& e) {
    throw BlowUpError(std::string(to_string(cfg.scheme)) + " run (N = " +
                          std::to_string(cfg.points) + ", dt = " + std::to_string(cfg.dt) +
                          "): " + e.what(),
                      e.step());
  }
  return traj;
}

/// λ_i = log₂(E_{i-1}/E_i) for i >= 1.
inline std::vector<double> observed_order(std::span<const double> errors) {
  if (errors.size() < 2) throw InvalidInput("observed_order: need at least two errors");
  for (double e : errors)
    if (!(e > 0.0) || !std::isfinite(e))
      throw InvalidInput("observed_order: errors must be positive and finite (degenerate refinement)");
  std::vector<double> orders(errors.size() - 1);
  for (std::size_t i = 1; i < errors.size(); ++i)
    orders[i - 1] = std::log2(errors[i - 1] / errors[i]);
  return orders;
}

struct ConvergenceRow {
  double resolution = 0.0;  ///< dt for time ladders, N for space ladders
  double abs_error = 0.0;
  double rel_error = 0.0;
  double order = std::numeric_limits<double>::quiet_NaN();  ///< NaN on the first row
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  ExperimentConfig config;
};

/// Assembles report rows; rejects nonpositive errors.
inline ConvergenceReport make_convergence_report(const ExperimentConfig& cfg,
                                                 std::span<const double> resolutions,
                                                 std::span<const double> errors,
                                                 std::span<const double> scales) {
  const auto orders = observed_order(errors);
  ConvergenceReport report{{}, cfg};
  for (std::size_t i = 0; i < errors.size(); ++i) {
    ConvergenceRow row{resolutions[i], errors[i], errors[i] / scales[i]};
    if (i > 0) row.order = orders[i - 1];
    report.rows.push_back(row);
  }
  return report;
}

/// Sup-norm differences of terminal states between consecutive step sizes
/// dt_i = dt_0/2^i, dt_0 = coarsest_dt or T/2. `levels` rows need levels+1 runs.
inline ConvergenceReport converge_time(const ExperimentConfig& cfg, std::size_t levels) {
  cfg.validate();
  if (levels < 3) throw InvalidInput("converge_time: levels must be >= 3");
  const double dt0 = cfg.coarsest_dt.value_or(cfg.final_time / 2.0);
  const auto u0 = initial_field(cfg);

  std::vector<std::vector<Complex>> terminal;
  std::vector<double> steps_dt;
  for (std::size_t i = 0; i <= levels; ++i) {
    const double dt = dt0 / std::ldexp(1.0, static_cast<int>(i));
    const auto n = detail::steps_for(cfg.final_time, dt, "converge_time");
    terminal.push_back(dft_inverse(integrate(cfg.scheme, cfg.params, u0, dt, n, cfg.dealias)));
    steps_dt.push_back(dt);
  }

  std::vector<double> errors, scales, resolutions;
  for (std::size_t i = 0; i < levels; ++i) {
    double e = 0.0;
    for (std::size_t j = 0; j < terminal[i].size(); ++j)
      e = std::max(e, std::abs(terminal[i][j] - terminal[i + 1][j]));
    errors.push_back(e);
    scales.push_back(max_abs(terminal[i]));
    resolutions.push_back(steps_dt[i]);
  }
  return make_convergence_report(cfg, resolutions, errors, scales);
}

/// Differences between N_i = N·2^i and N_{i+1}, measured at the coarse
/// collocation points after truncating the fine solution.
inline ConvergenceReport converge_space(const ExperimentConfig& cfg, std::size_t levels) {
  cfg.validate();
  if (levels < 3) throw InvalidInput("converge_space: levels must be >= 3");
  const auto steps = cfg.steps();

  std::vector<SpectralField> terminal;
  for (std::size_t i = 0; i <= levels; ++i) {
    ExperimentConfig level = cfg;
    level.points = cfg.points << i;
    terminal.push_back(
        integrate(cfg.scheme, cfg.params, initial_field(level), cfg.dt, steps, cfg.dealias));
  }

  std::vector<double> errors, scales, resolutions;
  for (std::size_t i = 0; i < levels; ++i) {
    const auto coarse = dft_inverse(terminal[i]);
    const auto diff = dft_inverse(truncate(terminal[i + 1], terminal[i].size()) - terminal[i]);
    errors.push_back(max_abs(diff));
    scales.push_back(max_abs(coarse));
    resolutions.push_back(static_cast<double>(terminal[i].size()));
  }
  return make_convergence_report(cfg, resolutions, errors, scales);
}

struct LinearValidation {
  ConvergenceReport report;  ///< sup error against the exact solution per dt
  SpectralField stepped;     ///< terminal state at the coarsest dt
  SpectralField exact;
};

/// Stepped vs exact linear solution at T for dt, dt/2, ..., dt/2^(levels-1).
inline LinearValidation validate_linear(const ExperimentConfig& cfg, std::size_t levels) {
  cfg.validate();
  if (cfg.params.alpha != 0.0) throw InvalidInput("validate_linear: requires alpha = 0");
  if (levels < 2) throw InvalidInput("validate_linear: levels must be >= 2");
  const auto u0 = initial_field(cfg);
  const auto exact = exact_linear_solution(cfg.params, u0, cfg.final_time);
  const auto exact_samples = dft_inverse(exact);

  std::optional<SpectralField> coarsest;
  std::vector<double> errors, scales, resolutions;
  for (std::size_t i = 0; i < levels; ++i) {
    const double dt = cfg.dt / std::ldexp(1.0, static_cast<int>(i));
    const auto n = detail::steps_for(cfg.final_time, dt, "validate_linear");
    auto u = integrate(cfg.scheme, cfg.params, u0, dt, n, cfg.dealias);
    const auto samples = dft_inverse(u);
    double e = 0.0;
    for (std::size_t j = 0; j < samples.size(); ++j)
      e = std::max(e, std::abs(samples[j] - exact_samples[j]));
    errors.push_back(e);
    scales.push_back(max_abs(exact_samples));
    resolutions.push_back(dt);
    if (i == 0) coarsest = std::move(u);
  }
  return {make_convergence_report(cfg, resolutions, errors, scales), std::move(*coarsest), exact};
}

/// sup over common snapshot times of ‖a(t) - b(t)‖₀.
inline double sup_l2_distance(const Trajectory& a, const Trajectory& b) {
  if (a.times() != b.times()) throw InvalidInput("sup_l2_distance: snapshot schedules differ");
  double d = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m)
    d = std::max(d, l2_norm(a.snapshots()[m] - b.snapshots()[m]));
  return d;
}

struct LimitReport {
  SweepParameter parameter = SweepParameter::eta;
  std::vector<double> values;
  std::vector<double> distances;
  double reference = 0.0;
  std::vector<Trajectory> runs;  ///< one per value, same order
  std::optional<Trajectory> reference_run;
  ExperimentConfig config;
};

inline ModelParams with_parameter(ModelParams p, SweepParameter which, double value) {
  (which == SweepParameter::eta ? p.eta : p.beta) = value;
  return p;
}

/// One run per value with everything else fixed, each compared against the
/// run at `reference`.
inline LimitReport limit_sweep(const ExperimentConfig& cfg, SweepParameter parameter,
                               std::span<const double> values, double reference = 0.0) {
  cfg.validate();
  detail::check_sweep_values(values);

  auto run_at = [&](double v) {
    ExperimentConfig c = cfg;
    c.params = with_parameter(cfg.params, parameter, v);
    try {
      return run_simulation(c);
    } catch (const BlowUpError& e) {
      throw BlowUpError(std::string(to_string(parameter)) + " = " + std::to_string(v) + ": " +
                            e.what(),
                        e.step());
    }
  };

  LimitReport report;
  report.parameter = parameter;
  report.values.assign(values.begin(), values.end());
  report.reference = reference;
  report.config = cfg;
  report.reference_run = run_at(reference);
  for (double v : values) {
    report.runs.push_back(v == reference ? *report.reference_run : run_at(v));
    report.distances.push_back(sup_l2_distance(report.runs.back(), *report.reference_run));
  }
  return report;
}

/// Least-squares slope p of log d = p log v + c over entries with v > 0, d > 0.
inline double fit_power_law(std::span<const double> values, std::span<const double> distances) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < values.size() && i < distances.size(); ++i) {
    if (!(values[i] > 0.0) || !(distances[i] > 0.0)) continue;
    const double x = std::log(values[i]), y = std::log(distances[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw InvalidInput("fit_power_law: need two positive points");
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

}  // namespace dnls
