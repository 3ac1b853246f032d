#include <doctest.h>

#include <cmath>
#include <random>

#include "sleeperloc/error.hpp"
#include "sleeperloc/track_model.hpp"

using namespace sleeperloc;

namespace {

double circular_gap(double a, double b, double period) {
  const double d = std::abs(a - b);
  return std::min(d, period - d);
}

}  // namespace

TEST_CASE("nearest_sleeper_phase") {
  const SleeperLattice lattice(0.6, 0.0);
  CHECK(nearest_sleeper_phase(lattice, 1.2) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(nearest_sleeper_phase(lattice, 1.25) == doctest::Approx(0.55).epsilon(1e-12));
  CHECK(nearest_sleeper_phase(SleeperLattice(0.6, 0.1), 0.0) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("visible_sleepers") {
  const SleeperLattice lattice(0.6, 0.0);
  const CameraGeometry cam(2.0, 2.4, PixelScale(100), 240);
  const auto vis = visible_sleepers(lattice, cam, 0.0);
  REQUIRE(vis.size() == 4);
  const double world[] = {2.4, 3.0, 3.6, 4.2};
  const double offset[] = {0.4, 1.0, 1.6, 2.2};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(vis[i].world_mileage == doctest::Approx(world[i]).epsilon(1e-12));
    CHECK(vis[i].strip_offset_m == doctest::Approx(offset[i]).epsilon(1e-12));
  }

  SUBCASE("strip shorter than tau between sleepers sees nothing") {
    const CameraGeometry narrow(2.0, 0.2, PixelScale(100), 20);
    CHECK(visible_sleepers(lattice, narrow, 0.1).empty());  // strip [2.1, 2.3]
  }
  SUBCASE("front on a sleeper with zero blind distance") {
    const CameraGeometry cam0(0.0, 2.56, PixelScale(100), 256);
    const auto v = visible_sleepers(lattice, cam0, 1.2);
    REQUIRE_FALSE(v.empty());
    CHECK(v.front().strip_offset_m == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("interval_of") {
  const Route route({0, 1100, 2400}, 2400);
  CHECK(interval_of(route, 0.0) == 0);
  CHECK(interval_of(route, 1099.999) == 0);
  CHECK(interval_of(route, 1100.0) == 1);
  CHECK(interval_of(route, 2400.0) == 1);
  try {
    interval_of(route, 5000.0);
    FAIL("expected OutOfRoute");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OutOfRoute);
  }
  CHECK_THROWS_AS(interval_of(route, -0.5), Error);
  CHECK(route.interval_label(1) == "2-3");
}

TEST_CASE("invalid model parameters are rejected") {
  CHECK_THROWS_AS(Route({0, 1100, 1000}, 2000), Error);
  CHECK_THROWS_AS(Route({5, 1100}, 2000), Error);
  CHECK_THROWS_AS(Route({0, 1100}, 1000), Error);
  CHECK_THROWS_AS(Route({0, 1100}, 1100, {{100, 300}, {200, 400}}), Error);
  CHECK_THROWS_AS(SleeperLattice(0.6, 0.6), Error);
  CHECK_THROWS_AS(SleeperLattice(0.0, 0.0), Error);
  CHECK_THROWS_AS(CameraGeometry(2.0, 2.56, PixelScale(100), 128), Error);
  CHECK_THROWS_AS(CameraGeometry(-1.0, 2.56, PixelScale(100), 256), Error);
}

TEST_CASE("property: phase periodicity and visible-sleeper consistency") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> tau_d(0.4, 0.8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> front_d(0.0, 7000.0);
  for (int i = 0; i < 2000; ++i) {
    const double tau = tau_d(rng);
    const SleeperLattice lattice(tau, unit(rng) * tau * 0.999);
    const double m = front_d(rng);
    const double th = nearest_sleeper_phase(lattice, m);
    CHECK(th >= 0.0);
    CHECK(th < tau);
    CHECK(circular_gap(nearest_sleeper_phase(lattice, m + tau), th, tau) <= 1e-9);

    const CameraGeometry cam(unit(rng) * 3.0, 2.56, PixelScale(100), 256);
    const auto vis = visible_sleepers(lattice, cam, m);
    REQUIRE_FALSE(vis.empty());
    const double reduced = wrap_to_period(vis.front().world_mileage - m, tau);
    CHECK(circular_gap(reduced, th, tau) <= 1e-9);
    for (std::size_t k = 1; k < vis.size(); ++k) CHECK(vis[k].strip_offset_m > vis[k - 1].strip_offset_m);
  }
}

TEST_CASE("property: interval_of partitions the route") {
  const Route route({0, 1100, 2400, 4000, 5300, 6900}, 6900);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> m(0.0, 6900.0);
  for (int i = 0; i < 5000; ++i) {
    const double x = m(rng);
    const std::size_t k = interval_of(route, x);
    const auto& st = route.station_mileages();
    CHECK(st[k] <= x);
    CHECK(x <= st[k + 1]);
    if (k + 1 < route.interval_count()) CHECK(x < st[k + 1]);
  }
}
