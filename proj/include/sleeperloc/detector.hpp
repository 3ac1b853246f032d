#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <vector>

#include "sleeperloc/geometry.hpp"
#include "sleeperloc/raster.hpp"

namespace sleeperloc {

/// A sleeper found in the aerial strip, enclosed by a fixed-size square box.
struct Detection {
  PixelPoint center;
  double box_side_px = 30.0;
  double confidence = 1.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

enum class InputKind { Oracle, Raster };

/// What a detector may look at for one frame. Either member may be absent.
struct FrameInput {
  const Raster* raster = nullptr;
  const std::vector<Detection>* oracle = nullptr;
};

/// Sleeper detector contract: output sorted nearest-first (ascending y),
/// confidences in [0, 1], deterministic for a given input.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual InputKind input_kind() const = 0;
  virtual std::vector<Detection> detect(const FrameInput& input) const = 0;
};

/// Passes the simulator's per-frame observations through unchanged (but sorted).
class OracleDetector final : public Detector {
 public:
  InputKind input_kind() const override { return InputKind::Oracle; }
  std::vector<Detection> detect(const FrameInput& input) const override;
};

struct PeakDetectorParams {
  double threshold = 0.5;
  double min_gap_px = 20.0;
  double box_side_px = 30.0;
};

class PeakDetector final : public Detector {
 public:
  explicit PeakDetector(PeakDetectorParams params = {});
  InputKind input_kind() const override { return InputKind::Raster; }
  std::vector<Detection> detect(const FrameInput& input) const override;
  const PeakDetectorParams& params() const { return params_; }

 private:
  PeakDetectorParams params_;
};

/// Row-profile threshold detector: averages each row, groups rows above
/// `threshold` into runs (runs closer than `min_gap_px` merge) and reports one
/// detection per run at its intensity-weighted centroid row.
std::vector<Detection> peak_detect(const Raster& strip, double threshold, double min_gap_px,
                                   double box_side_px = 30.0);

struct DetectionScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  double mean_latency_s = 0.0;
};

/// Per-frame greedy one-to-one matching of predicted to true rows, smallest
/// distance first, accepting pairs within `match_tol_px`.
DetectionScore score_detections(const std::vector<std::vector<double>>& predicted_y,
                                const std::vector<std::vector<double>>& truth_y, double match_tol_px);
DetectionScore score_detections(const std::vector<std::vector<Detection>>& predicted,
                                const std::vector<std::vector<double>>& truth_y, double match_tol_px);

/// One row of the `frame,det_idx,y_px,confidence` dump.
struct DetectionRecord {
  std::size_t frame = 0;
  std::size_t det_idx = 0;
  double y_px = 0.0;
  double confidence = 1.0;
};

void write_detection_csv(std::ostream& os, const std::vector<std::vector<Detection>>& per_frame);
/// Groups records by frame; frames missing from the file become empty lists.
std::vector<std::vector<double>> read_detection_csv(std::istream& is);

}  // namespace sleeperloc
