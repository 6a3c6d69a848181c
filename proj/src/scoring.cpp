#include "mcpad/scoring.hpp"

#include <algorithm>
#include <vector>

namespace mcpad {

namespace {

// Preference order: higher probability, then bonafide over non-face, then
// lower anchor index.
bool better_than(const Detection &a, const Detection &b) {
  if (a.probability != b.probability) return a.probability > b.probability;
  if (a.label != b.label) return a.label == ObjectClass::bonafide;
  return a.anchor_index < b.anchor_index;
}

}  // namespace

std::optional<Detection> select_detection(std::span<const Detection> dets,
                                          double det_threshold) {
  std::optional<Detection> best;
  for (const Detection &d : dets) {
    if (d.probability < det_threshold) continue;
    if (!best || better_than(d, *best)) best = d;
  }
  return best;
}

PadScore pad_score(const std::optional<Detection> &det, double floor) {
  PadScore s;
  if (!det) {
    s.value = floor;
    s.provenance = ScoreProvenance::no_detection;
  } else if (det->label == ObjectClass::bonafide) {
    s.value = det->probability;
    s.provenance = ScoreProvenance::bonafide_detection;
  } else {
    s.value = 1.0 - det->probability;
    s.provenance = ScoreProvenance::nonface_detection;
  }
  return s;
}

PadScore aggregate_video(std::span<const PadScore> frames,
                         AggregationRule rule) {
  if (frames.empty())
    throw error("aggregate_video: empty frame score list");

  PadScore out;
  if (rule == AggregationRule::mean) {
    double sum = 0.0;
    for (const PadScore &f : frames) sum += f.value;
    out.value = sum / static_cast<double>(frames.size());
  } else {
    std::vector<double> v(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) v[i] = frames[i].value;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    out.value = n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
  }

  out.provenance = ScoreProvenance::no_detection;
  double best = -1.0;
  for (const PadScore &f : frames) {
    if (f.provenance != ScoreProvenance::no_detection && f.value > best) {
      best = f.value;
      out.provenance = f.provenance;
    }
  }
  return out;
}

}  // namespace mcpad
