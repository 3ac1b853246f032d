#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "sleeperloc/config.hpp"
#include "sleeperloc/error.hpp"
#include "sleeperloc/estimator.hpp"
#include "sleeperloc/track_model.hpp"
#include "test_support.hpp"

using namespace sleeperloc;
using sleeperloc::testing::brute_force_visual;
using sleeperloc::testing::true_nearest_px;

namespace {

const CorrectionContext kCtx(0.6, 2.0, PixelScale(100.0), 0.5);

Scenario small_scenario(std::uint64_t seed, SensorModel sensor = {}) {
  sensor.seed = seed;
  return Scenario{Route({0, 400, 900}, 900),
                  SleeperLattice(0.6, 0.13),
                  CameraGeometry(2.0, 2.56, PixelScale(100), 256),
                  SpeedProfile{{12.0, 15.0}, 0.8, 1.0, 10.0},
                  sensor,
                  1.0 / 15.0};
}

// Distance between two phases on the circle of circumference tau.
double phase_gap(double a, double b, double tau) {
  const double d = std::fmod(std::abs(a - b), tau);
  return std::min(d, tau - d);
}

}  // namespace

TEST_CASE("correction_factor examples") {
  const auto cf = correction_factor(kCtx, 30.0);
  CHECK(cf.theta == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_FALSE(cf.fallback_used);

  const auto none = correction_factor(kCtx, std::nullopt);
  CHECK(none.theta == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(none.fallback_used);

  const CorrectionContext zero_blind(0.6, 0.0, PixelScale(100.0), 0.5);
  const auto on = correction_factor(zero_blind, 0.0);
  CHECK(on.theta == 0.0);
  CHECK_FALSE(on.fallback_used);

  // A full spacing or more into the strip counts as a failed detection.
  CHECK(correction_factor(kCtx, 60.0).fallback_used);
  CHECK_FALSE(correction_factor(kCtx, 59.9).fallback_used);

  CHECK_THROWS_AS(CorrectionContext(0.6, 2.0, PixelScale(100.0), 1.0), Error);
  CHECK_THROWS_AS(CorrectionContext(0.0, 2.0, PixelScale(100.0), 0.5), Error);
  CHECK_THROWS_AS(CorrectionContext(0.6, -1.0, PixelScale(100.0), 0.5), Error);
}

TEST_CASE("sensor_distance, sleeper_count and remainder_gamma examples") {
  CHECK(sensor_distance(10, 12, 0.1) == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(sensor_distance(0, 0, 0.1) == 0.0);
  CHECK(sensor_distance(8, 8, 1.0 / 15.0) == doctest::Approx(8.0 / 15.0).epsilon(1e-15));
  try {
    sensor_distance(1, 1, 0.0);
    FAIL("expected NonPositiveInterval");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPositiveInterval);
  }

  CHECK(sleeper_count(1.1, 0.6) == 1);
  CHECK(sleeper_count(0.0, 0.6) == 0);
  CHECK(sleeper_count(1.2, 0.6) == 2);

  CHECK(remainder_gamma(0.2, 0.5, 0.6) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(remainder_gamma(0.5, 0.2, 0.6) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(remainder_gamma(0.4, 0.4, 0.6) == 0.0);

  CHECK(nearest_sleeper_count(1.19, 0.0, 0.6) == 2);
  CHECK(nearest_sleeper_count(1.3, 0.1, 0.6) == 2);
  CHECK(nearest_sleeper_count(0.01, 0.59, 0.6) == -1);
}

TEST_CASE("property: range and modulo identity") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> tau_d(0.2, 1.5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 5000; ++i) {
    const double tau = tau_d(rng);
    const CorrectionContext ctx(tau, 5.0 * u(rng), PixelScale(20.0 + 200.0 * u(rng)), 0.05 + 0.9 * u(rng));
    const double px = 1.2 * tau * ctx.scale.px_per_m() * u(rng);
    const auto cf = correction_factor(ctx, px);
    CHECK(cf.theta >= 0.0);
    CHECK(cf.theta < tau);
    const double g = remainder_gamma(tau * u(rng), tau * u(rng), tau);
    CHECK(g >= 0.0);
    CHECK(g < tau);

    const CorrectionContext bare(tau, 0.0, PixelScale(1.0), 0.5);
    const double x = tau * u(rng) * 0.999;
    CHECK(correction_factor(bare, x).theta == doctest::Approx(x - std::floor(x / tau) * tau).epsilon(1e-9));
  }
}

TEST_CASE("property: visual phase equals the true lattice phase") {
  const SimRun run = generate_run(small_scenario(3));
  const double tol = 1.0 / (2.0 * kCtx.scale.px_per_m()) + 1e-9;
  for (const auto& f : run.frames) {
    const auto cf = correction_factor(kCtx, nearest_detection_px(f.oracle_detections));
    REQUIRE_FALSE(cf.fallback_used);
    CHECK(phase_gap(cf.theta, nearest_sleeper_phase(run.lattice, f.true_mileage), kCtx.tau) <= tol);
  }
}

TEST_CASE("step_visual examples") {
  const SleeperLattice lat(0.6, 0.0);
  const double dt = 1.0 / 15.0;

  SUBCASE("stationary train") {
    auto s = start_visual(kCtx, 0.0, true_nearest_px(lat, kCtx, 100.0), 100.0);
    s = step_visual(s, kCtx, {dt, 0.0, 0.0, dt, true_nearest_px(lat, kCtx, 100.0)});
    CHECK(s.last.d_delt == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.last.sleeper_count == 0);
    CHECK(s.last.mileage == doctest::Approx(100.0).epsilon(1e-12));
  }

  SUBCASE("advance of exactly one spacing") {
    auto s = start_visual(kCtx, 0.0, true_nearest_px(lat, kCtx, 10.25), 10.25);
    const double v = 0.6 / dt;
    s = step_visual(s, kCtx, {dt, v, v, dt, true_nearest_px(lat, kCtx, 10.85)});
    CHECK(s.last.d_delt == doctest::Approx(0.6).epsilon(1e-9));
    CHECK(phase_gap(s.last.gamma, 0.0, 0.6) < 1e-9);
  }

  SUBCASE("fallback frames keep counting from the last real detection") {
    auto s = start_visual(kCtx, 0.0, true_nearest_px(lat, kCtx, 50.0), 50.0);
    const double v = 7.3;
    double truth = 50.0;
    for (int k = 1; k <= 6; ++k) {
      truth += v * dt;
      const std::optional<double> px = (k % 3 == 0) ? std::optional<double>(true_nearest_px(lat, kCtx, truth))
                                                    : std::nullopt;
      s = step_visual(s, kCtx, {k * dt, v, v, dt, px});
      if (px) CHECK(s.last.mileage == doctest::Approx(truth).epsilon(1e-12));
      else CHECK(s.last.fallback_used);
    }
  }
}

TEST_CASE("step_direct examples") {
  PositionEstimate s;
  s = step_direct(s, 0.1, 10, 10, 0.1);
  CHECK(s.mileage == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.d_delt == doctest::Approx(1.0).epsilon(1e-15));
  s = step_direct(s, 0.2, 0, 0, 0.1);
  CHECK(s.d_delt == 0.0);
  CHECK(s.mileage == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(step_direct(s, 0.2, 1, 1, -0.1), Error);
}

TEST_CASE("a single bad sensor step shifts d_delt by exactly one spacing") {
  const SleeperLattice lat(0.6, 0.0);
  const double dt = 1.0 / 15.0;
  const double v = 7.5;
  const double tol = 1.0 / (2.0 * kCtx.scale.px_per_m());
  for (const double sign : {+1.0, -1.0}) {
    auto s = start_visual(kCtx, 0.0, true_nearest_px(lat, kCtx, 200.0), 200.0);
    double truth = 200.0;
    for (int k = 1; k <= 10; ++k) {
      truth += v * dt;
      double vm = v;
      if (k == 5) vm += sign * 0.6 * kCtx.tau / dt;
      const double prev = s.last.mileage;
      s = step_visual(s, kCtx, {k * dt, vm, vm, dt, true_nearest_px(lat, kCtx, truth)});
      const double step_err = (s.last.mileage - prev) - v * dt;
      if (k == 5) {
        CHECK(std::abs(step_err) == doctest::Approx(kCtx.tau).epsilon(1e-9));
        CHECK(step_err * sign > 0.0);
      } else {
        CHECK(std::abs(step_err) <= 1e-9);
      }
      if (k > 5) CHECK(std::abs(s.last.mileage - truth) <= tol + kCtx.tau + 1e-9);
    }
  }
}

TEST_CASE("run_estimator on zero-noise runs") {
  const SimRun run = generate_run(small_scenario(9));
  const OracleDetector det;
  const auto vis = run_estimator(run, EstimatorKind::Visual, kCtx, det);
  const auto dir = run_estimator(run, EstimatorKind::Direct, kCtx, det);
  REQUIRE(vis.size() == run.frames.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < vis.size(); ++i) worst = std::max(worst, std::abs(vis[i].mileage - run.frames[i].true_mileage));
  CHECK(worst <= 1.0 / (2.0 * 100.0) + 1e-9);
  CHECK(dir.back().mileage == doctest::Approx(900.0).epsilon(1e-4));

  const ScenarioConfig ref = load_scenario(SLEEPERLOC_SOURCE_DIR "/configs/reference.json");
  Scenario clean = ref.scenario;
  clean.sensor = SensorModel{};
  const SimRun ref_run = generate_run(clean);
  const auto ref_dir = run_estimator(ref_run, EstimatorKind::Direct, ref.correction_context(), det);
  // Trapezoid integration is exact on constant-acceleration segments; only the
  // handful of frames straddling a phase change contribute error.
  CHECK(std::abs(ref_dir.back().mileage - 6900.0) <= 0.05);
}

TEST_CASE("visual estimator matches a brute-force re-evaluation") {
  SensorModel noisy;
  noisy.speed_bias = 0.01;
  noisy.speed_noise_sigma = 0.1;
  noisy.detect_miss_prob = 0.1;
  noisy.detect_pixel_sigma = 1.0;
  noisy.false_positive_rate = 0.1;
  Scenario sc = small_scenario(21, noisy);
  SimRun run = generate_run(sc);
  run.frames.resize(1000);
  const auto est = run_estimator(run, EstimatorKind::Visual, kCtx, OracleDetector{});
  const auto oracle = brute_force_visual(run, kCtx);
  REQUIRE(est.size() == oracle.size());
  for (std::size_t i = 0; i < est.size(); ++i) CHECK(est[i].mileage == doctest::Approx(oracle[i]).epsilon(1e-12));
}

TEST_CASE("streaming estimators agree with run_estimator") {
  const SimRun run = generate_run(small_scenario(4));
  const auto batch = run_estimator(run, EstimatorKind::Visual, kCtx, OracleDetector{});
  VisualEstimator v(kCtx);
  DirectEstimator d;
  for (std::size_t i = 0; i < run.frames.size(); ++i) {
    const auto& f = run.frames[i];
    CHECK(v.push(f.t, f.measured_speed, nearest_detection_px(f.oracle_detections)).mileage == batch[i].mileage);
    d.push(f.t, f.measured_speed);
  }
  CHECK(d.current().mileage > 0.0);
}

TEST_CASE("reported mileage and trace CSV") {
  PositionEstimate e;
  e.mileage = -0.3;
  CHECK(reported_mileage(e, 100.0) == 0.0);
  e.mileage = 100.4;
  CHECK(reported_mileage(e, 100.0) == 100.0);

  SimRun run = generate_run(small_scenario(2));
  run.frames.resize(50);
  const auto est = run_estimator(run, EstimatorKind::Visual, kCtx, OracleDetector{});
  std::ostringstream os;
  write_trace_csv(os, run, est, EstimatorKind::Visual);
  CHECK(os.str().rfind("t_s,est_mileage_m,true_mileage_m,err_m,L,gamma_m,theta_m,fallback\n", 0) == 0);
  std::istringstream is(os.str());
  const auto tr = read_trace_csv(is);
  REQUIRE(tr.t.size() == 50);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(tr.t[i] == run.frames[i].t);
    CHECK(tr.truth[i] == run.frames[i].true_mileage);
    CHECK(tr.estimate[i] == reported_mileage(est[i], 900.0));
  }

  std::ostringstream od;
  write_trace_csv(od, run, run_estimator(run, EstimatorKind::Direct, kCtx, OracleDetector{}), EstimatorKind::Direct);
  std::istringstream id(od.str());
  CHECK(read_trace_csv(id).t.size() == 50);
}
