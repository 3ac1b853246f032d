#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "sleeperloc/error.hpp"
#include "sleeperloc/report.hpp"

using namespace sleeperloc;

namespace {

const Route kRoute({0, 1100, 2400, 4000, 5300, 6900}, 6900);

std::size_t count_lines_with(const std::string& text, const std::string& needle) {
  std::size_t n = 0, pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++n;
    pos += needle.size();
  }
  return n;
}

}  // namespace

TEST_CASE("compute_errors examples") {
  const std::vector<double> truth{0.0, 500.0, 1000.0, 2000.0, 3000.0, 6900.0};
  const auto exact = compute_errors(truth, truth, kRoute);
  CHECK(exact.whole_route.me_m == 0.0);
  CHECK(exact.whole_route.mpe == 0.0);
  CHECK(exact.n_points == 6);
  REQUIRE(exact.per_interval.size() == 5);
  CHECK(exact.per_interval[0].label == "1-2");
  CHECK(exact.per_interval[4].label == "5-6");
  CHECK(exact.whole_route.label == "Whole Route");

  const std::vector<double> t2{1000.0, 2000.0};
  const std::vector<double> e2{1010.0, 1990.0};
  const auto r = compute_errors(e2, t2, kRoute);
  CHECK(r.whole_route.me_m == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(r.whole_route.mpe == doctest::Approx(0.0075).epsilon(1e-15));
  CHECK(r.per_interval[0].n == 1);
  CHECK(r.per_interval[1].n == 1);
  CHECK(r.per_interval[2].n == 0);

  // Sub-meter truths count toward ME but not MPE.
  const auto origin = compute_errors(std::vector<double>{0.5, 110.0}, std::vector<double>{0.0, 100.0}, kRoute);
  CHECK(origin.whole_route.me_m == 10.0);
  CHECK(origin.whole_route.mpe == doctest::Approx(0.1).epsilon(1e-15));

  try {
    compute_errors(std::vector<double>{}, std::vector<double>{}, kRoute);
    FAIL("expected EmptySeries");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptySeries);
  }
  try {
    compute_errors(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}, kRoute);
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LengthMismatch);
  }
}

TEST_CASE("emit_report formats") {
  const std::vector<double> truth{10.0, 1500.0, 2500.0, 4500.0, 6000.0};
  const auto zero = compute_errors(truth, truth, kRoute);
  const std::string table = emit_report(zero, "table");
  CHECK(count_lines_with(table, "0.00%") == 6);
  CHECK(table.find("Whole Route") != std::string::npos);
  CHECK(table.find("5-6") != std::string::npos);

  const std::string csv = emit_report(zero, "csv");
  CHECK(csv.rfind("interval,me_m,mpe,n\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);

  CHECK_THROWS_AS(emit_report(zero, "xml"), Error);
}

TEST_CASE("json round trip is lossless") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> m(0.0, 6900.0);
  std::normal_distribution<double> noise(0.0, 3.7);
  std::vector<double> truth(400), est(400);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    truth[i] = m(rng);
    est[i] = truth[i] + noise(rng);
  }
  const auto r = compute_errors(est, truth, kRoute);
  const auto back = parse_report_json(emit_report(r, "json"));
  CHECK(back.n_points == r.n_points);
  REQUIRE(back.per_interval.size() == r.per_interval.size());
  for (std::size_t i = 0; i < r.per_interval.size(); ++i) {
    CHECK(back.per_interval[i].label == r.per_interval[i].label);
    CHECK(back.per_interval[i].me_m == r.per_interval[i].me_m);
    CHECK(back.per_interval[i].mpe == r.per_interval[i].mpe);
    CHECK(back.per_interval[i].n == r.per_interval[i].n);
  }
  CHECK(back.whole_route.me_m == r.whole_route.me_m);
  CHECK(back.whole_route.mpe == r.whole_route.mpe);
  CHECK_THROWS_AS(parse_report_json("{\"intervals\": 3}"), Error);

  const std::string cmp = emit_comparison_table(r, back);
  CHECK(cmp.find("Whole Route") != std::string::npos);
}

TEST_CASE("property: max decomposition, scaling and permutation") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> m(1.0, 6900.0);
  std::normal_distribution<double> noise(0.0, 5.0);
  std::uniform_real_distribution<double> kd(0.1, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> truth(200), err(200), est(200);
    for (std::size_t i = 0; i < truth.size(); ++i) {
      truth[i] = m(rng);
      err[i] = noise(rng);
      est[i] = truth[i] + err[i];
    }
    const auto r = compute_errors(est, truth, kRoute);
    double max_interval = 0.0;
    std::size_t total = 0;
    for (const auto& iv : r.per_interval) {
      max_interval = std::max(max_interval, iv.me_m);
      total += iv.n;
    }
    CHECK(r.whole_route.me_m == max_interval);
    CHECK(total == r.n_points);

    const double k = kd(rng);
    std::vector<double> scaled(200);
    for (std::size_t i = 0; i < truth.size(); ++i) scaled[i] = truth[i] + k * err[i];
    const auto rk = compute_errors(scaled, truth, kRoute);
    CHECK(rk.whole_route.me_m == doctest::Approx(k * r.whole_route.me_m).epsilon(1e-9));
    CHECK(rk.whole_route.mpe == doctest::Approx(k * r.whole_route.mpe).epsilon(1e-9));

    std::vector<std::size_t> idx(200);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<double> pt(200), pe(200);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      pt[i] = truth[idx[i]];
      pe[i] = est[idx[i]];
    }
    const auto rp = compute_errors(pe, pt, kRoute);
    CHECK(rp.whole_route.me_m == r.whole_route.me_m);
    CHECK(rp.whole_route.mpe == doctest::Approx(r.whole_route.mpe).epsilon(1e-12));
    for (std::size_t i = 0; i < r.per_interval.size(); ++i) {
      CHECK(rp.per_interval[i].me_m == r.per_interval[i].me_m);
      CHECK(rp.per_interval[i].mpe == doctest::Approx(r.per_interval[i].mpe).epsilon(1e-12));
    }
  }
}
