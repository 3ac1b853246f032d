#include "sleeperloc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "sleeperloc/csv.hpp"
#include "sleeperloc/error.hpp"
#include "sleeperloc/track_model.hpp"

namespace sleeperloc {

CorrectionContext::CorrectionContext(double tau_m, double d_b, PixelScale r, double xi_frac)
    : tau(tau_m), blind_distance_m(d_b), scale(r), xi(xi_frac) {
  if (!(tau > 0.0)) throw Error(ErrorKind::ConfigInvalid, "tau must be positive");
  if (!(blind_distance_m >= 0.0)) throw Error(ErrorKind::ConfigInvalid, "blind distance must be non-negative");
  if (!(xi > 0.0 && xi < 1.0)) throw Error(ErrorKind::ConfigInvalid, "xi must lie in (0, 1)");
}

CorrectionFactor correction_factor(const CorrectionContext& ctx, std::optional<double> nearest_px) {
  if (nearest_px) {
    const double theta_r = pixel_to_world(ctx.scale, *nearest_px);
    if (theta_r < ctx.tau) {
      const double ahead = theta_r + ctx.blind_distance_m;
      double theta = ahead - std::floor(ahead / ctx.tau) * ctx.tau;
      // floor() on a rounded quotient can leave theta a hair outside [0, tau).
      if (theta >= ctx.tau) theta -= ctx.tau;
      if (theta < 0.0) theta += ctx.tau;
      if (theta >= ctx.tau) theta = 0.0;
      return {theta + 0.0, false};
    }
  }
  return {ctx.xi * ctx.tau, true};
}

double sensor_distance(double v1, double v2, double interval_s) {
  if (!(interval_s > 0.0)) throw Error(ErrorKind::NonPositiveInterval, "frame interval must be positive");
  return 0.5 * (v1 + v2) * interval_s;
}

long long sleeper_count(double d_vt, double tau) { return static_cast<long long>(std::floor(d_vt / tau)); }

double remainder_gamma(double theta1, double theta2, double tau) {
  double g = theta2 >= theta1 ? theta2 - theta1 : theta2 - theta1 + tau;
  if (g >= tau) g -= tau;
  return g;
}

long long nearest_sleeper_count(double d_vt, double gamma, double tau) {
  return static_cast<long long>(std::floor((d_vt - gamma) / tau + 0.5));
}

VisualState start_visual(const CorrectionContext& ctx, double t, std::optional<double> nearest_px,
                         double start_mileage) {
  const CorrectionFactor cf = correction_factor(ctx, nearest_px);
  VisualState s;
  s.last.t = t;
  s.last.mileage = start_mileage;
  s.last.theta = cf.theta;
  s.last.fallback_used = cf.fallback_used;
  s.anchor_mileage = start_mileage;
  s.anchor_theta = cf.theta;
  return s;
}

VisualState step_visual(const VisualState& state, const CorrectionContext& ctx, const StepInput& in) {
  const double d_vt = state.distance_since_anchor + sensor_distance(in.v1, in.v2, in.interval_s);
  const CorrectionFactor cf = correction_factor(ctx, in.nearest_px);
  // theta counts down as the front approaches the next sleeper, so the phase
  // advance is anchor minus current, wrapped.
  const double gamma = remainder_gamma(cf.theta, state.anchor_theta, ctx.tau);
  const long long count = nearest_sleeper_count(d_vt, gamma, ctx.tau);
  const double mileage = state.anchor_mileage + static_cast<double>(count) * ctx.tau + gamma;

  VisualState next;
  next.last.t = in.t;
  next.last.mileage = mileage;
  next.last.d_delt = mileage - state.last.mileage;
  next.last.sleeper_count = count;
  next.last.gamma = gamma;
  next.last.theta = cf.theta;
  next.last.fallback_used = cf.fallback_used;
  if (cf.fallback_used) {
    next.anchor_mileage = state.anchor_mileage;
    next.anchor_theta = state.anchor_theta;
    next.distance_since_anchor = d_vt;
  } else {
    next.anchor_mileage = mileage;
    next.anchor_theta = cf.theta;
    next.distance_since_anchor = 0.0;
  }
  return next;
}

PositionEstimate step_direct(const PositionEstimate& state, double t, double v1, double v2, double interval_s) {
  PositionEstimate next;
  next.t = t;
  next.d_delt = sensor_distance(v1, v2, interval_s);
  next.mileage = state.mileage + next.d_delt;
  return next;
}

std::optional<double> nearest_detection_px(std::span<const Detection> dets) {
  if (dets.empty()) return std::nullopt;
  const auto it = std::min_element(dets.begin(), dets.end(),
                                   [](const Detection& a, const Detection& b) { return a.center.y < b.center.y; });
  return std::max(0.0, it->center.y);
}

VisualEstimator::VisualEstimator(CorrectionContext ctx, double start_mileage)
    : ctx_(ctx), start_mileage_(start_mileage) {
  state_.last.mileage = start_mileage;
}

const PositionEstimate& VisualEstimator::push(double t, double measured_speed, std::optional<double> nearest_px) {
  if (!started_) {
    state_ = start_visual(ctx_, t, nearest_px, start_mileage_);
    started_ = true;
  } else {
    state_ = step_visual(state_, ctx_, {t, last_speed_, measured_speed, t - state_.last.t, nearest_px});
  }
  last_speed_ = measured_speed;
  return state_.last;
}

DirectEstimator::DirectEstimator(double start_mileage) { state_.mileage = start_mileage; }

const PositionEstimate& DirectEstimator::push(double t, double measured_speed) {
  if (!started_) {
    state_.t = t;
    started_ = true;
  } else {
    state_ = step_direct(state_, t, last_speed_, measured_speed, t - state_.t);
  }
  last_speed_ = measured_speed;
  return state_;
}

std::vector<PositionEstimate> run_estimator(const SimRun& run, EstimatorKind kind, const CorrectionContext& ctx,
                                            const Detector& detector) {
  if (run.frames.empty()) throw Error(ErrorKind::EmptySeries, "run has no frames");
  std::vector<PositionEstimate> out;
  out.reserve(run.frames.size());
  if (kind == EstimatorKind::Direct) {
    DirectEstimator est;
    for (const auto& f : run.frames) out.push_back(est.push(f.t, f.measured_speed));
    return out;
  }
  VisualEstimator est(ctx);
  for (const auto& f : run.frames) {
    const FrameInput input{f.aerial_raster ? &*f.aerial_raster : nullptr, &f.oracle_detections};
    const auto dets = detector.detect(input);
    out.push_back(est.push(f.t, f.measured_speed, nearest_detection_px(dets)));
  }
  return out;
}

double reported_mileage(const PositionEstimate& e, double route_length) {
  return std::clamp(e.mileage, 0.0, route_length);
}

void write_trace_csv(std::ostream& os, const SimRun& run, const std::vector<PositionEstimate>& estimates,
                     EstimatorKind kind) {
  if (estimates.size() != run.frames.size()) {
    throw Error(ErrorKind::LengthMismatch, "estimate count differs from frame count");
  }
  os << "t_s,est_mileage_m,true_mileage_m,err_m,L,gamma_m,theta_m,fallback\n";
  const double length = run.route.total_length();
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    const auto& e = estimates[k];
    const double est = reported_mileage(e, length);
    const double truth = run.frames[k].true_mileage;
    os << csv::format_double(run.frames[k].t) << ',' << csv::format_double(est) << ',' << csv::format_double(truth)
       << ',' << csv::format_double(est - truth);
    if (kind == EstimatorKind::Visual) {
      os << ',' << e.sleeper_count << ',' << csv::format_double(e.gamma) << ',' << csv::format_double(e.theta) << ','
         << (e.fallback_used ? 1 : 0);
    } else {
      os << ",,,,";
    }
    os << '\n';
  }
}

TraceSeries read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::ConfigInvalid, "estimate CSV is empty");
  const auto header = csv::split(line);
  if (header.size() < 3 || header[0] != "t_s" || header[1] != "est_mileage_m" || header[2] != "true_mileage_m") {
    throw Error(ErrorKind::ConfigInvalid, "estimate CSV must start with t_s,est_mileage_m,true_mileage_m");
  }
  TraceSeries s;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = csv::split(line);
    if (cells.size() != header.size()) throw Error(ErrorKind::ConfigInvalid, "estimate CSV row has wrong cell count");
    s.t.push_back(csv::parse_double(cells[0], "t_s"));
    s.estimate.push_back(csv::parse_double(cells[1], "est_mileage_m"));
    s.truth.push_back(csv::parse_double(cells[2], "true_mileage_m"));
  }
  return s;
}

}  // namespace sleeperloc
