#include "sleeperloc/detector.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <tuple>

#include "sleeperloc/csv.hpp"
#include "sleeperloc/error.hpp"

namespace sleeperloc {

namespace {

void sort_nearest_first(std::vector<Detection>& dets) {
  std::stable_sort(dets.begin(), dets.end(),
                   [](const Detection& a, const Detection& b) { return a.center.y < b.center.y; });
}

}  // namespace

std::vector<Detection> OracleDetector::detect(const FrameInput& input) const {
  if (input.oracle == nullptr) throw Error(ErrorKind::InputKindMismatch, "oracle detector needs oracle frame data");
  std::vector<Detection> out = *input.oracle;
  sort_nearest_first(out);
  return out;
}

PeakDetector::PeakDetector(PeakDetectorParams params) : params_(params) {
  if (!(params_.threshold > 0.0 && params_.threshold < 1.0)) {
    throw Error(ErrorKind::ConfigInvalid, "peak threshold must lie in (0, 1)");
  }
  if (!(params_.box_side_px > 0.0)) throw Error(ErrorKind::ConfigInvalid, "box side must be positive");
}

std::vector<Detection> PeakDetector::detect(const FrameInput& input) const {
  if (input.raster == nullptr) throw Error(ErrorKind::InputKindMismatch, "peak detector needs an aerial raster");
  return peak_detect(*input.raster, params_.threshold, params_.min_gap_px, params_.box_side_px);
}

std::vector<Detection> peak_detect(const Raster& strip, double threshold, double min_gap_px, double box_side_px) {
  std::vector<Detection> out;
  if (strip.empty()) return out;

  std::vector<double> profile(strip.height, 0.0);
  for (std::size_t y = 0; y < strip.height; ++y) {
    double s = 0.0;
    for (std::size_t x = 0; x < strip.width; ++x) s += strip.at(x, y);
    profile[y] = s / static_cast<double>(strip.width);
  }

  struct Run {
    std::size_t last_row = 0;
    double weight = 0.0;
    double moment = 0.0;
    double peak = 0.0;
  };
  std::vector<Run> runs;
  for (std::size_t y = 0; y < strip.height; ++y) {
    const double v = profile[y];
    if (!(v > threshold)) continue;
    const bool extend = !runs.empty() && static_cast<double>(y - runs.back().last_row) < min_gap_px;
    if (!extend) runs.push_back({});
    Run& r = runs.back();
    r.last_row = y;
    r.weight += v;
    r.moment += v * static_cast<double>(y);
    r.peak = std::max(r.peak, v);
  }

  const double cx = static_cast<double>(strip.width) / 2.0;
  out.reserve(runs.size());
  for (const Run& r : runs) {
    const double conf = std::clamp((r.peak - threshold) / (1.0 - threshold), 0.0, 1.0);
    out.push_back({{cx, r.moment / r.weight}, box_side_px, conf});
  }
  return out;
}

DetectionScore score_detections(const std::vector<std::vector<double>>& predicted_y,
                                const std::vector<std::vector<double>>& truth_y, double match_tol_px) {
  if (!(match_tol_px > 0.0)) throw Error(ErrorKind::ConfigInvalid, "match tolerance must be positive");
  if (predicted_y.size() != truth_y.size()) {
    throw Error(ErrorKind::LengthMismatch, "prediction and truth frame counts differ");
  }

  DetectionScore s;
  for (std::size_t f = 0; f < truth_y.size(); ++f) {
    const auto& pred = predicted_y[f];
    const auto& truth = truth_y[f];
    // (distance, pred value, truth value, pred idx, truth idx): ties resolve on
    // values, so the result does not depend on input order.
    std::vector<std::tuple<double, double, double, std::size_t, std::size_t>> cand;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      for (std::size_t j = 0; j < truth.size(); ++j) {
        const double d = std::abs(pred[i] - truth[j]);
        if (d <= match_tol_px) cand.emplace_back(d, pred[i], truth[j], i, j);
      }
    }
    std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
      return std::tie(std::get<0>(a), std::get<1>(a), std::get<2>(a)) <
             std::tie(std::get<0>(b), std::get<1>(b), std::get<2>(b));
    });
    std::vector<bool> pred_used(pred.size(), false);
    std::vector<bool> truth_used(truth.size(), false);
    std::size_t tp = 0;
    for (const auto& [d, pv, tv, i, j] : cand) {
      if (pred_used[i] || truth_used[j]) continue;
      pred_used[i] = truth_used[j] = true;
      ++tp;
    }
    s.true_positives += tp;
    s.false_positives += pred.size() - tp;
    s.false_negatives += truth.size() - tp;
  }

  const auto tp = static_cast<double>(s.true_positives);
  if (s.true_positives + s.false_positives > 0) {
    s.precision = tp / static_cast<double>(s.true_positives + s.false_positives);
  }
  if (s.true_positives + s.false_negatives > 0) {
    s.recall = tp / static_cast<double>(s.true_positives + s.false_negatives);
  }
  if (s.precision + s.recall > 0.0) s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

DetectionScore score_detections(const std::vector<std::vector<Detection>>& predicted,
                                const std::vector<std::vector<double>>& truth_y, double match_tol_px) {
  std::vector<std::vector<double>> ys(predicted.size());
  for (std::size_t f = 0; f < predicted.size(); ++f) {
    for (const auto& d : predicted[f]) ys[f].push_back(d.center.y);
  }
  return score_detections(ys, truth_y, match_tol_px);
}

void write_detection_csv(std::ostream& os, const std::vector<std::vector<Detection>>& per_frame) {
  os << "frame,det_idx,y_px,confidence\n";
  for (std::size_t f = 0; f < per_frame.size(); ++f) {
    for (std::size_t i = 0; i < per_frame[f].size(); ++i) {
      const auto& d = per_frame[f][i];
      os << f << ',' << i << ',' << csv::format_double(d.center.y) << ',' << csv::format_double(d.confidence)
         << '\n';
    }
  }
}

std::vector<std::vector<double>> read_detection_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::ConfigInvalid, "detection CSV is empty");
  const auto header = csv::split(line);
  if (header.size() != 4 || header[0] != "frame" || header[1] != "det_idx" || header[2] != "y_px" ||
      header[3] != "confidence") {
    throw Error(ErrorKind::ConfigInvalid, "detection CSV header must be frame,det_idx,y_px,confidence");
  }
  std::vector<std::vector<std::pair<long long, double>>> frames;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = csv::split(line);
    if (cells.size() != 4) throw Error(ErrorKind::ConfigInvalid, "detection CSV row needs 4 cells");
    const long long frame = csv::parse_int(cells[0], "frame");
    const long long idx = csv::parse_int(cells[1], "det_idx");
    if (frame < 0 || idx < 0) throw Error(ErrorKind::ConfigInvalid, "negative frame or detection index");
    const double y = csv::parse_double(cells[2], "y_px");
    csv::parse_double(cells[3], "confidence");
    if (static_cast<std::size_t>(frame) >= frames.size()) frames.resize(static_cast<std::size_t>(frame) + 1);
    frames[static_cast<std::size_t>(frame)].emplace_back(idx, y);
  }
  std::vector<std::vector<double>> out(frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    std::sort(frames[f].begin(), frames[f].end());
    for (const auto& [idx, y] : frames[f]) out[f].push_back(y);
  }
  return out;
}

}  // namespace sleeperloc
