#include "sleeperloc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "sleeperloc/csv.hpp"
#include "sleeperloc/error.hpp"

namespace sleeperloc {

namespace {

constexpr double kBackground = 0.2;
constexpr double kBand = 0.9;
constexpr std::uint64_t kRasterStreamTag = 0x52415354ULL;

struct Segment {
  double t0;
  double duration;
  double x0;
  double v0;
  double accel;
};

std::vector<Segment> build_segments(const Route& route, const SpeedProfile& profile) {
  const auto& st = route.station_mileages();
  if (profile.cruise_mps.size() != route.interval_count()) {
    throw Error(ErrorKind::ConfigInvalid, "speed profile needs one cruise speed per station interval");
  }
  if (!(profile.accel_mps2 > 0.0) || !(profile.decel_mps2 > 0.0)) {
    throw Error(ErrorKind::InfeasibleProfile, "acceleration and deceleration must be positive");
  }
  if (!(profile.dwell_s >= 0.0)) throw Error(ErrorKind::InfeasibleProfile, "dwell time must be non-negative");

  std::vector<Segment> segs;
  double t = 0.0;
  for (std::size_t i = 0; i < route.interval_count(); ++i) {
    const double length = st[i + 1] - st[i];
    const double v = profile.cruise_mps[i];
    if (!(v > 0.0)) throw Error(ErrorKind::InfeasibleProfile, "cruise speed must be positive");
    const double ta = v / profile.accel_mps2;
    const double td = v / profile.decel_mps2;
    const double xa = 0.5 * v * ta;
    const double xd = 0.5 * v * td;
    if (xa + xd > length + 1e-9) {
      throw Error(ErrorKind::InfeasibleProfile,
                  "cruise speed " + std::to_string(v) + " m/s cannot be reached in interval " + route.interval_label(i));
    }
    const double xc = std::max(0.0, length - xa - xd);
    const double tc = xc / v;
    segs.push_back({t, ta, st[i], 0.0, profile.accel_mps2});
    t += ta;
    if (tc > 0.0) {
      segs.push_back({t, tc, st[i] + xa, v, 0.0});
      t += tc;
    }
    segs.push_back({t, td, st[i + 1] - xd, v, -profile.decel_mps2});
    t += td;
    if (i + 1 < route.interval_count() && profile.dwell_s > 0.0) {
      segs.push_back({t, profile.dwell_s, st[i + 1], 0.0, 0.0});
      t += profile.dwell_s;
    }
  }
  return segs;
}

KinematicSample sample_at(const std::vector<Segment>& segs, double end_mileage, double t) {
  const Segment& last = segs.back();
  if (t >= last.t0 + last.duration) return {t, end_mileage, 0.0};
  auto it = std::upper_bound(segs.begin(), segs.end(), t, [](double tv, const Segment& s) { return tv < s.t0; });
  const Segment& s = *(it == segs.begin() ? it : it - 1);
  const double u = t - s.t0;
  const double v = std::max(0.0, s.v0 + s.accel * u);
  const double x = s.x0 + s.v0 * u + 0.5 * s.accel * u * u;
  return {t, x, v};
}

double total_duration(const std::vector<Segment>& segs) { return segs.back().t0 + segs.back().duration; }

}  // namespace

void SensorModel::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(detect_miss_prob)) throw Error(ErrorKind::ConfigInvalid, "detect_miss_prob must lie in [0, 1]");
  if (!(speed_noise_sigma >= 0.0) || !(detect_pixel_sigma >= 0.0)) {
    throw Error(ErrorKind::ConfigInvalid, "sensor sigmas must be non-negative");
  }
  if (!(false_positive_rate >= 0.0)) throw Error(ErrorKind::ConfigInvalid, "false_positive_rate must be >= 0");
  if (!std::isfinite(speed_bias)) throw Error(ErrorKind::ConfigInvalid, "speed_bias must be finite");
}

std::vector<KinematicSample> generate_kinematics(const Route& route, const SpeedProfile& profile, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::NonPositiveInterval, "time step must be positive");
  const auto segs = build_segments(route, profile);
  const double duration = total_duration(segs);
  const auto last_k = static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
  const double end = route.station_mileages().back();

  std::vector<KinematicSample> out;
  out.reserve(last_k + 1);
  for (std::size_t k = 0; k <= last_k; ++k) {
    out.push_back(sample_at(segs, end, static_cast<double>(k) * dt));
  }
  return out;
}

double corrupt_speed(const SensorModel& model, double true_speed, std::mt19937_64& rng) {
  std::normal_distribution<double> unit(0.0, 1.0);
  const double z = unit(rng);
  return std::max(0.0, true_speed * (1.0 + model.speed_bias) + model.speed_noise_sigma * z);
}

Raster render_aerial_strip(const SleeperLattice& lattice, const CameraGeometry& cam, double front_mileage,
                           double noise_sigma, std::mt19937_64& rng) {
  const std::size_t n = cam.strip_pixels;
  const double r = cam.scale.px_per_m();
  const double band_px = std::max(1.0, std::round(0.1 * lattice.tau * r));

  std::vector<double> profile(n, kBackground);
  for (const auto& s : visible_sleepers(lattice, cam, front_mileage)) {
    const double lo = s.strip_offset_m * r - band_px / 2.0;
    const double hi = s.strip_offset_m * r + band_px / 2.0;
    const auto first = static_cast<long>(std::floor(lo + 0.5));
    const auto last = static_cast<long>(std::ceil(hi - 0.5));
    for (long row = std::max(0L, first); row <= std::min(static_cast<long>(n) - 1, last); ++row) {
      const double y = static_cast<double>(row);
      const double cover = std::clamp(std::min(hi, y + 0.5) - std::max(lo, y - 0.5), 0.0, 1.0);
      profile[static_cast<std::size_t>(row)] =
          std::max(profile[static_cast<std::size_t>(row)], kBackground + cover * (kBand - kBackground));
    }
  }

  Raster out(n, n);
  std::normal_distribution<double> unit(0.0, 1.0);
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      double v = profile[y];
      if (noise_sigma > 0.0) v += noise_sigma * unit(rng);
      out.at(x, y) = std::clamp(v, 0.0, 1.0);
    }
  }
  return out;
}

SimRun generate_run(const Scenario& sc) {
  sc.sensor.validate();
  if (!(sc.box_side_px > 0.0)) throw Error(ErrorKind::ConfigInvalid, "box side must be positive");
  const auto kin = generate_kinematics(sc.route, sc.profile, sc.dt_s);

  const double r = sc.camera.scale.px_per_m();
  const double strip = static_cast<double>(sc.camera.strip_pixels);
  const double cx = strip / 2.0;

  std::mt19937_64 rng(sc.sensor.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> unit(0.0, 1.0);

  SimRun run{{}, sc.route, sc.lattice, sc.camera, sc.dt_s};
  run.frames.reserve(kin.size());
  for (std::size_t k = 0; k < kin.size(); ++k) {
    const auto& ks = kin[k];
    SimFrame f;
    f.t = ks.t;
    f.true_mileage = ks.mileage;
    f.true_speed = ks.speed;
    f.measured_speed = corrupt_speed(sc.sensor, ks.speed, rng);

    std::vector<std::pair<Detection, bool>> dets;
    for (const auto& s : visible_sleepers(sc.lattice, sc.camera, ks.mileage)) {
      const double y_true = s.strip_offset_m * r;
      f.truth_px.push_back(y_true);
      const double u = unif(rng);
      const double z = unit(rng);
      if (u < sc.sensor.detect_miss_prob) continue;
      const double y = y_true + sc.sensor.detect_pixel_sigma * z;
      if (y < 0.0 || y > strip) continue;
      dets.push_back({{{cx, y}, sc.box_side_px, 1.0}, false});
    }
    if (sc.sensor.false_positive_rate > 0.0) {
      std::poisson_distribution<int> spurious_count(sc.sensor.false_positive_rate);
      const int n = spurious_count(rng);
      for (int i = 0; i < n; ++i) dets.push_back({{{cx, unif(rng) * strip}, sc.box_side_px, 1.0}, true});
    }
    std::stable_sort(dets.begin(), dets.end(),
                     [](const auto& a, const auto& b) { return a.first.center.y < b.first.center.y; });
    for (auto& [d, fp] : dets) {
      f.oracle_detections.push_back(d);
      f.spurious.push_back(fp);
    }

    if (sc.render_raster) {
      std::seed_seq seq{static_cast<std::uint32_t>(sc.sensor.seed), static_cast<std::uint32_t>(sc.sensor.seed >> 32),
                        static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(kRasterStreamTag)};
      std::mt19937_64 raster_rng(seq);
      f.aerial_raster = render_aerial_strip(sc.lattice, sc.camera, ks.mileage, sc.raster_noise_sigma, raster_rng);
    }
    run.frames.push_back(std::move(f));
  }
  return run;
}

void write_run_csv(std::ostream& os, const SimRun& run) {
  std::size_t max_det = 0;
  for (const auto& f : run.frames) max_det = std::max(max_det, f.oracle_detections.size());
  os << "t_s,true_mileage_m,true_speed_mps,measured_speed_mps,det_count";
  for (std::size_t i = 0; i < max_det; ++i) os << ",det_px_" << i;
  os << '\n';
  for (const auto& f : run.frames) {
    os << csv::format_double(f.t) << ',' << csv::format_double(f.true_mileage) << ','
       << csv::format_double(f.true_speed) << ',' << csv::format_double(f.measured_speed) << ','
       << f.oracle_detections.size();
    for (std::size_t i = 0; i < max_det; ++i) {
      os << ',';
      if (i < f.oracle_detections.size()) os << csv::format_double(f.oracle_detections[i].center.y);
    }
    os << '\n';
  }
}

SimRun read_run_csv(std::istream& is, const Scenario& sc) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::ConfigInvalid, "run CSV is empty");
  const auto header = csv::split(line);
  const char* fixed[] = {"t_s", "true_mileage_m", "true_speed_mps", "measured_speed_mps", "det_count"};
  if (header.size() < 5) throw Error(ErrorKind::ConfigInvalid, "run CSV header is too short");
  for (std::size_t i = 0; i < 5; ++i) {
    if (header[i] != fixed[i]) throw Error(ErrorKind::ConfigInvalid, "unexpected run CSV column " + std::string(header[i]));
  }
  const std::size_t max_det = header.size() - 5;

  const double cx = static_cast<double>(sc.camera.strip_pixels) / 2.0;
  SimRun run{{}, sc.route, sc.lattice, sc.camera, sc.dt_s};
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = csv::split(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::ConfigInvalid, "run CSV row " + std::to_string(row) + " has the wrong cell count");
    }
    SimFrame f;
    f.t = csv::parse_double(cells[0], "t_s");
    f.true_mileage = csv::parse_double(cells[1], "true_mileage_m");
    f.true_speed = csv::parse_double(cells[2], "true_speed_mps");
    f.measured_speed = csv::parse_double(cells[3], "measured_speed_mps");
    const long long n = csv::parse_int(cells[4], "det_count");
    if (n < 0 || static_cast<std::size_t>(n) > max_det) {
      throw Error(ErrorKind::ConfigInvalid, "det_count out of range on row " + std::to_string(row));
    }
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
      f.oracle_detections.push_back({{cx, csv::parse_double(cells[5 + i], "det_px")}, sc.box_side_px, 1.0});
      f.spurious.push_back(false);
    }
    run.frames.push_back(std::move(f));
  }
  if (run.frames.empty()) throw Error(ErrorKind::EmptySeries, "run CSV has no frames");
  return run;
}

void write_pgm(std::ostream& os, const Raster& raster) {
  os << "P5\n" << raster.width << ' ' << raster.height << "\n255\n";
  std::string bytes(raster.pixels.size(), '\0');
  std::transform(raster.pixels.begin(), raster.pixels.end(), bytes.begin(), [](double v) {
    return static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
  });
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace sleeperloc
