#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "dnls/experiments.hpp"
#include "support.hpp"

using namespace dnls;
using dnls::testing::max_coeff_diff;

namespace {

ExperimentConfig mixed_config() {
  ExperimentConfig c;
  c.params = {-1.0, 0.5, 0.5, 0.5};
  c.length = 50.0;
  c.points = 512;
  c.u0 = {"gaussian", 25.0, 1.0};
  c.dt = 0.01;
  c.final_time = 1.0;
  return c;
}

// diffusive sweep setup: L = 50, N = 512, dt = 0.015, alpha = -1, beta = gamma = 0
ExperimentConfig eta_sweep_config() {
  ExperimentConfig c;
  c.params = {-1.0, 0.0, 0.0, 0.5};
  c.length = 50.0;
  c.points = 512;
  c.u0 = {"gaussian", 25.0, 1.0};
  c.dt = 0.015;
  c.final_time = 0.75;
  c.protocol = Protocol::limit_sweep;
  return c;
}

}  // namespace

TEST_CASE("observed order", "[experiments][order]") {
  SECTION("known ratios") {
    const std::vector<double> t1{2.5852e-5, 6.4447e-6};
    CHECK(observed_order(t1)[0] == Catch::Approx(2.0041).margin(5e-5));
    const std::vector<double> t2{2.6727e-6, 1.6187e-7};
    CHECK(observed_order(t2)[0] == Catch::Approx(4.045).margin(5e-4));
    const std::vector<double> halves{8.0, 4.0};
    CHECK(observed_order(halves)[0] == 1.0);
  }

  SECTION("geometric sequences give the exact rate") {
    for (double r : {0.5, 0.25, 0.125, 0.3, 1e-3}) {
      std::vector<double> e;
      for (int i = 0; i < 8; ++i) e.push_back(std::pow(r, i));
      for (double l : observed_order(e)) REQUIRE(std::abs(l - std::log2(1.0 / r)) <= 1e-12);
    }
  }

  SECTION("degenerate inputs are rejected") {
    const std::vector<double> zero{1e-3, 0.0};
    const std::vector<double> negative{1e-3, -1e-4};
    const std::vector<double> single{1e-3};
    const std::vector<double> nan{1e-3, std::nan("")};
    CHECK_THROWS_AS(observed_order(zero), InvalidInput);
    CHECK_THROWS_AS(observed_order(negative), InvalidInput);
    CHECK_THROWS_AS(observed_order(single), InvalidInput);
    CHECK_THROWS_AS(observed_order(nan), InvalidInput);
  }
}

TEST_CASE("config validation", "[experiments][config]") {
  auto c = mixed_config();
  CHECK_NOTHROW(c.validate());
  CHECK(c.steps() == 100);

  auto bad = c;
  bad.dt = 2.0;
  CHECK_THROWS_WITH(bad.validate(), Catch::Matchers::ContainsSubstring("dt exceeds T"));
  bad = c;
  bad.dt = 0.03;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = c;
  bad.final_time = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = c;
  bad.points = 30 + 1;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = c;
  bad.params.eta = -1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = c;
  bad.u0.type = "sech";
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = c;
  bad.sweep = SweepSpec{SweepParameter::eta, {0.1, 0.5}, 0.0};
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad.sweep = SweepSpec{SweepParameter::eta, {0.5, -0.1}, 0.0};
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = c;
  bad.coarsest_dt = 3.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);

  CHECK(parse_protocol("converge-space") == Protocol::converge_space);
  CHECK_FALSE(parse_protocol("converge_space").has_value());
  CHECK(to_string(Protocol::limit_sweep) == "limit-sweep");
  CHECK(parse_sweep_parameter("beta") == SweepParameter::beta);
  CHECK_FALSE(parse_sweep_parameter("gamma").has_value());
}

TEST_CASE("run_simulation", "[experiments][run]") {
  SECTION("snapshot schedule includes t = 0 and ends at T") {
    auto c = mixed_config();
    c.snapshots = 4;
    const auto traj = run_simulation(c);
    REQUIRE(traj.size() == 5);
    const std::vector<double> expected{0.0, 0.25, 0.5, 0.75, 1.0};
    for (std::size_t i = 0; i < expected.size(); ++i)
      CHECK(traj.times()[i] == Catch::Approx(expected[i]).margin(1e-14));
    CHECK(traj.metadata().scheme == "cnab2");
  }

  SECTION("more snapshots than steps records every step") {
    auto c = mixed_config();
    c.final_time = 0.03;
    c.snapshots = 10;
    CHECK(run_simulation(c).size() == 4);
  }

  SECTION("zero data stays zero") {
    auto c = mixed_config();
    c.u0.type = "zero";
    for (const auto& u : run_simulation(c).snapshots()) CHECK(l2_norm(u) == 0.0);
  }

  SECTION("linear runs track the exact solution at every snapshot at second order") {
    ExperimentConfig c;
    c.params = {0.0, 1.0, -1.0, 1.0};
    c.length = 100.0;
    c.points = 512;
    c.u0 = {"gaussian", 30.0, 1.0};
    c.final_time = 2.0;
    for (Scheme scheme : {Scheme::cnab2, Scheme::etd2}) {
      c.scheme = scheme;
      std::vector<double> worst;
      for (double dt : {0.01, 0.005}) {
        c.dt = dt;
        const auto traj = run_simulation(c);
        const auto u0 = initial_field(c);
        double e = 0.0;
        for (std::size_t m = 0; m < traj.size(); ++m) {
          const auto exact = exact_linear_solution(c.params, u0, traj.times()[m]);
          e = std::max(e, max_abs(dft_inverse(traj.snapshots()[m] - exact)));
        }
        worst.push_back(e);
      }
      INFO(to_string(scheme) << " errors " << worst[0] << " " << worst[1]);
      if (scheme == Scheme::etd2) {
        CHECK(worst[0] < 1e-13);  // exact propagation when alpha = 0
      } else {
        CHECK(worst[1] < 1e-3);
        CHECK(worst[0] / worst[1] == Catch::Approx(4.0).margin(0.5));
      }
    }
  }

  SECTION("identical configs give bit-identical trajectories") {
    const auto c = mixed_config();
    const auto a = run_simulation(c);
    const auto b = run_simulation(c);
    REQUIRE(a.times() == b.times());
    for (std::size_t m = 0; m < a.size(); ++m)
      REQUIRE(std::ranges::equal(a.snapshots()[m].coeffs(), b.snapshots()[m].coeffs()));
  }

  SECTION("diffusive sweep setup runs to T for each eta") {
    for (double eta : {1.0, 0.5, 0.1, 0.0}) {
      auto c = eta_sweep_config();
      c.params.eta = eta;
      const auto traj = run_simulation(c);
      CHECK(traj.times().back() == Catch::Approx(0.75));
      CHECK(traj.back().all_finite());
    }
  }

  SECTION("blow-up errors carry the run context") {
    auto c = mixed_config();
    c.u0.width = 1e-3;  // under-resolved spike
    c.params.alpha = -1e8;
    try {
      run_simulation(c);
      FAIL("expected BlowUpError");
    } catch (const BlowUpError& e) {
      CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("cnab2 run"));
    }
  }
}

TEST_CASE("converge_time", "[experiments][convergence]") {
  SECTION("linear problem shows second order from the coarsest step") {
    ExperimentConfig c;
    c.params = {0.0, 0.5, 0.5, 0.5};
    c.length = 50.0;
    c.points = 256;
    c.u0 = {"gaussian", 25.0, 1.0};
    c.dt = 0.01;
    c.final_time = 1.0;
    c.coarsest_dt = 0.02;
    const auto report = converge_time(c, 4);
    REQUIRE(report.rows.size() == 4);
    CHECK(std::isnan(report.rows[0].order));
    CHECK(report.rows[0].resolution == 0.02);
    CHECK(report.rows[3].resolution == 0.0025);
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
      CHECK(report.rows[i].order == Catch::Approx(2.0).margin(0.05));
      CHECK(report.rows[i].abs_error < report.rows[i - 1].abs_error);
      CHECK(report.rows[i].rel_error > 0.0);
    }
  }

  SECTION("default ladder starts at T/2") {
    auto c = mixed_config();
    c.points = 128;
    const auto report = converge_time(c, 3);
    CHECK(report.rows[0].resolution == 0.5);
    CHECK(report.config == c);
  }

  SECTION("identical runs are rejected as degenerate") {
    auto c = mixed_config();
    c.u0.type = "zero";
    CHECK_THROWS_AS(converge_time(c, 3), InvalidInput);
  }

  SECTION("too few levels are rejected") {
    CHECK_THROWS_AS(converge_time(mixed_config(), 2), InvalidInput);
  }
}

TEST_CASE("converge_space", "[experiments][convergence]") {
  SECTION("Gaussian truncation tail reaches the rounding floor") {
    double last = 1.0;
    for (std::size_t n : {32, 64, 128, 256, 512}) {
      const PeriodicGrid coarse(50.0, n), fine(50.0, 2 * n);
      const auto a = dnls::testing::gaussian(coarse, 25.0);
      const auto b = dnls::testing::gaussian(fine, 25.0);
      last = max_abs(dft_inverse(truncate(b, n) - a));
    }
    CHECK(last <= 1e-12);
  }

  SECTION("restriction by truncation equals comparing retained coefficients") {
    std::mt19937_64 rng(11);
    const PeriodicGrid coarse(20.0, 32), fine(20.0, 64);
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = dnls::testing::random_field(coarse, rng, 16);
      const auto b = dnls::testing::random_field(fine, rng, 32);
      double direct = 0.0;
      for (long k = coarse.min_mode(); k <= coarse.max_mode(); ++k)
        direct += std::norm(b.at_mode(k) - a.at_mode(k));
      REQUIRE(std::abs(l2_norm(truncate(b, 32) - a) - std::sqrt(direct)) <= 1e-13);
    }
  }

  SECTION("nonlinear ladder decays by at least 8 per doubling down to the floor") {
    auto c = mixed_config();
    c.points = 32;
    c.dt = 1e-4;
    c.final_time = 0.05;
    const auto report = converge_space(c, 4);
    REQUIRE(report.rows.size() == 4);
    CHECK(report.rows[0].resolution == 32.0);
    CHECK(report.rows[3].resolution == 256.0);
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
      const double prev = report.rows[i - 1].abs_error, now = report.rows[i].abs_error;
      INFO("N " << report.rows[i].resolution << " error " << now);
      CHECK((now <= 1e-12 || prev / now >= 8.0));
    }
    CHECK(report.rows.back().abs_error <= 1e-10);
  }

  SECTION("identical levels are rejected") {
    auto c = mixed_config();
    c.u0.type = "zero";
    c.points = 32;
    CHECK_THROWS_AS(converge_space(c, 3), InvalidInput);
  }
}

TEST_CASE("validate_linear", "[experiments][linear]") {
  ExperimentConfig c;
  c.params = {0.0, 1.0, -1.0, 1.0};
  c.length = 100.0;
  c.points = 512;
  c.u0 = {"gaussian", 30.0, 1.0};
  c.dt = 0.1;
  c.final_time = 10.0;

  const auto v = validate_linear(c, 3);
  REQUIRE(v.report.rows.size() == 3);
  CHECK(v.report.rows[0].resolution == 0.1);
  for (std::size_t i = 1; i < 3; ++i) {
    const double ratio = v.report.rows[i - 1].abs_error / v.report.rows[i].abs_error;
    CHECK(ratio == Catch::Approx(4.0).margin(0.3));
  }
  CHECK(max_coeff_diff(v.exact, exact_linear_solution(c.params, initial_field(c), 10.0)) == 0.0);
  CHECK(max_abs(dft_inverse(v.stepped - v.exact)) ==
        Catch::Approx(v.report.rows[0].abs_error).epsilon(1e-12));

  auto nonlinear = c;
  nonlinear.params.alpha = -1.0;
  CHECK_THROWS_AS(validate_linear(nonlinear, 3), InvalidInput);
}

TEST_CASE("limit_sweep", "[experiments][limit]") {
  SECTION("reference entry has zero distance and distances fall with eta") {
    const auto c = eta_sweep_config();
    const std::vector<double> values{0.5, 0.25, 0.125, 0.0625, 0.0};
    const auto report = limit_sweep(c, SweepParameter::eta, values);
    REQUIRE(report.distances.size() == values.size());
    REQUIRE(report.runs.size() == values.size());
    CHECK(report.distances.back() == 0.0);
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
      INFO("eta " << values[i] << " d " << report.distances[i]);
      CHECK(report.distances[i] < report.distances[i - 1]);
    }
    const double p = fit_power_law(values, report.distances);
    INFO("fitted exponent " << p);
    CHECK(p >= 0.4);
  }

  SECTION("distance is symmetric and zero on identical runs") {
    auto c = eta_sweep_config();
    c.final_time = 0.3;
    const auto a = run_simulation(c);
    c.params.eta = 0.1;
    const auto b = run_simulation(c);
    CHECK(sup_l2_distance(a, b) == sup_l2_distance(b, a));
    CHECK(sup_l2_distance(a, a) == 0.0);
    CHECK(sup_l2_distance(a, b) > 0.0);
  }

  SECTION("non-decreasing values are rejected") {
    const std::vector<double> values{0.1, 0.1};
    CHECK_THROWS_AS(limit_sweep(eta_sweep_config(), SweepParameter::eta, values), InvalidInput);
  }

  SECTION("power-law fit recovers a known exponent") {
    const std::vector<double> v{1.0, 0.5, 0.25, 0.125, 0.0};
    std::vector<double> d;
    for (double x : v) d.push_back(3.0 * std::pow(x, 0.7));
    CHECK(fit_power_law(v, d) == Catch::Approx(0.7).epsilon(1e-12));
  }

  SECTION("with_parameter edits only the swept coefficient") {
    const ModelParams p{-1.0, 0.2, 0.3, 0.4};
    CHECK(with_parameter(p, SweepParameter::beta, 0.0) == ModelParams{-1.0, 0.0, 0.3, 0.4});
    CHECK(with_parameter(p, SweepParameter::eta, 1.0) == ModelParams{-1.0, 0.2, 0.3, 1.0});
  }
}
