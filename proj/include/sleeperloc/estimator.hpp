#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "sleeperloc/detector.hpp"
#include "sleeperloc/geometry.hpp"
#include "sleeperloc/simulator.hpp"

namespace sleeperloc {

struct CorrectionContext {
  double tau;
  double blind_distance_m;
  PixelScale scale;
  double xi;  // fallback phase as a fraction of tau, in (0, 1)

  CorrectionContext(double tau_m, double d_b, PixelScale r, double xi_frac);
};

struct CorrectionFactor {
  double theta = 0.0;  // train front to next sleeper ahead, reduced into [0, tau)
  bool fallback_used = false;
};

struct PositionEstimate {
  double t = 0.0;
  double mileage = 0.0;  // raw, unclamped
  double d_delt = 0.0;
  long long sleeper_count = 0;
  double gamma = 0.0;
  double theta = 0.0;
  bool fallback_used = false;
};

/// Phase of the train front against the sleeper lattice, read from the
/// nearest detected sleeper row. Falls back to xi * tau when there is no
/// detection or the nearest one lies a full spacing or more into the strip.
CorrectionFactor correction_factor(const CorrectionContext& ctx, std::optional<double> nearest_px);

/// Trapezoidal distance from two speed readings T seconds apart.
double sensor_distance(double v1, double v2, double interval_s);

/// Whole spacings contained in d_vt: floor(d_vt / tau).
long long sleeper_count(double d_vt, double tau);

/// theta2 - theta1 wrapped into [0, tau).
double remainder_gamma(double theta1, double theta2, double tau);

/// Number of whole spacings that, added to `gamma`, lands closest to the
/// sensor distance. Correct whenever the sensor error is below tau / 2.
long long nearest_sleeper_count(double d_vt, double gamma, double tau);

struct StepInput {
  double t = 0.0;
  double v1 = 0.0;
  double v2 = 0.0;
  double interval_s = 0.0;
  std::optional<double> nearest_px;  // nearest detection at the new frame
};

/// Streaming state of the visual estimator. The anchor is the most recent
/// frame whose correction factor came from a real detection; whole spacings
/// are always counted from there, so a fallback frame's guessed phase never
/// leaks into later estimates.
struct VisualState {
  PositionEstimate last;
  double anchor_mileage = 0.0;
  double anchor_theta = 0.0;
  double distance_since_anchor = 0.0;  // sensor distance accumulated after the anchor
};

/// State for the first frame: its own correction factor becomes the anchor.
VisualState start_visual(const CorrectionContext& ctx, double t, std::optional<double> nearest_px,
                         double start_mileage = 0.0);

/// Advances a visual-corrected estimate by one frame:
/// d = L * tau + gamma measured from the anchor, with gamma the wrapped phase
/// advance and L the whole-spacing count closest to the sensor distance.
VisualState step_visual(const VisualState& state, const CorrectionContext& ctx, const StepInput& in);

/// Dead-reckoning baseline: trapezoidal integration of measured speed.
PositionEstimate step_direct(const PositionEstimate& state, double t, double v1, double v2, double interval_s);

/// Nearest-first detection row, or nothing for an empty frame.
std::optional<double> nearest_detection_px(std::span<const Detection> dets);

enum class EstimatorKind { Visual, Direct };

/// Streaming visual estimator; feed frames in time order.
class VisualEstimator {
 public:
  explicit VisualEstimator(CorrectionContext ctx, double start_mileage = 0.0);
  const PositionEstimate& push(double t, double measured_speed, std::optional<double> nearest_px);
  const PositionEstimate& current() const { return state_.last; }

 private:
  CorrectionContext ctx_;
  VisualState state_;
  double start_mileage_;
  double last_speed_ = 0.0;
  bool started_ = false;
};

class DirectEstimator {
 public:
  explicit DirectEstimator(double start_mileage = 0.0);
  const PositionEstimate& push(double t, double measured_speed);
  const PositionEstimate& current() const { return state_; }

 private:
  PositionEstimate state_;
  double last_speed_ = 0.0;
  bool started_ = false;
};

/// One estimate per frame, starting at mileage 0 (station 1).
std::vector<PositionEstimate> run_estimator(const SimRun& run, EstimatorKind kind, const CorrectionContext& ctx,
                                            const Detector& detector);

/// Estimate clamped into the route for reporting.
double reported_mileage(const PositionEstimate& e, double route_length);

/// `t_s,est_mileage_m,true_mileage_m,err_m,L,gamma_m,theta_m,fallback`
void write_trace_csv(std::ostream& os, const SimRun& run, const std::vector<PositionEstimate>& estimates,
                     EstimatorKind kind);

struct TraceSeries {
  std::vector<double> t;
  std::vector<double> estimate;
  std::vector<double> truth;
};

TraceSeries read_trace_csv(std::istream& is);

}  // namespace sleeperloc
