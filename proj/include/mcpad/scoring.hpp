#ifndef MCPAD_SCORING_HPP
#define MCPAD_SCORING_HPP

#include <optional>
#include <span>

#include "mcpad/detector.hpp"

namespace mcpad {

enum class ScoreProvenance { bonafide_detection, nonface_detection, no_detection };

// Scalar PAD score; higher means more bonafide. Classification at a
// threshold tau is bonafide iff value >= tau.
struct PadScore {
  double value = 0.0;
  ScoreProvenance provenance = ScoreProvenance::no_detection;
};

// The detection with maximum class probability among those at or above
// det_threshold; absent when none qualify. Ties broken bonafide over
// non-face, then lowest anchor index, so the result is invariant under
// permutation of the input.
std::optional<Detection> select_detection(std::span<const Detection> dets,
                                          double det_threshold);

// Frame score: P_bonafide for a bonafide detection, 1 - P_non-face for a
// non-face detection, the floor (default 0, "unseen attack") otherwise.
PadScore pad_score(const std::optional<Detection> &det, double floor = 0.0);

enum class AggregationRule { mean, median };

// Video-level score from frame scores. Provenance is that of the
// highest-scoring frame, or no_detection when every frame lacked one.
// Throws on an empty list.
PadScore aggregate_video(std::span<const PadScore> frames, AggregationRule rule);

}  // namespace mcpad

#endif  // MCPAD_SCORING_HPP
