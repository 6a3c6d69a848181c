#ifndef MCPAD_LOSS_HPP
#define MCPAD_LOSS_HPP

#include <array>
#include <cmath>
#include <span>

#include "mcpad/geometry.hpp"

namespace mcpad {

// Binary detection label, y in {+1, -1}.
enum class BinaryLabel : int { positive = 1, negative = -1 };

struct FocalConfig {
  double alpha = 0.75;  // balance weight in (0, 1]
  double gamma = 2.0;   // focusing exponent >= 0
};

// Probabilities are clamped to [kProbEpsilon, 1 - kProbEpsilon] before any
// logarithm so losses stay finite.
inline constexpr double kProbEpsilon = 1e-7;

inline double clamp_prob(double p) {
  if (p < kProbEpsilon) return kProbEpsilon;
  if (p > 1.0 - kProbEpsilon) return 1.0 - kProbEpsilon;
  return p;
}

inline double sigmoid(double logit) { return 1.0 / (1.0 + std::exp(-logit)); }

// p for y = +1, 1 - p otherwise.
double p_t(double p, BinaryLabel y);

// alpha for y = +1, 1 - alpha otherwise.
double alpha_t(BinaryLabel y, const FocalConfig &cfg);

// -ln(p_t), with clamping.
double cross_entropy(double p, BinaryLabel y);

// Focal loss kernel on p_t directly: -alpha_t * (1 - p_t)^gamma * ln(p_t).
double focal_loss_pt(double pt, double alpha_t, double gamma);

// Focal loss in terms of (p, y) and the balanced config.
double focal_loss(double p, BinaryLabel y, const FocalConfig &cfg);

// Exact derivative of focal_loss with respect to the pre-sigmoid logit,
// p = sigmoid(logit). Zero inside the probability clamp region.
double focal_loss_grad(double logit, BinaryLabel y, const FocalConfig &cfg);

inline constexpr double kDefaultSmoothL1Beta = 1.0 / 9.0;

// Per-coordinate 0.5 d^2/beta for |d| < beta, |d| - 0.5 beta otherwise,
// summed over the four box coordinates. beta > 0.
double smooth_l1(const BoxDeltas &pred, const BoxDeltas &target, double beta);

// d smooth_l1 / d pred, per coordinate.
BoxDeltas smooth_l1_grad(const BoxDeltas &pred, const BoxDeltas &target,
                         double beta);

// One-vs-all detector head output for a single anchor.
struct AnchorPrediction {
  double prob_bonafide = 0.5;
  double prob_non_face = 0.5;
  BoxDeltas deltas = {0, 0, 0, 0};
};

struct BatchLossResult {
  double total = 0.0;
  double classification = 0.0;
  double regression = 0.0;
};

// Detector batch loss over one image's anchors. Classification: focal loss
// per class (bonafide, non-face) over every non-ignored anchor, a positive
// anchor being y=+1 for its class and y=-1 for the other, background
// anchors y=-1 for both. Regression: smooth L1 over positive anchors only.
// Both parts are normalized by max(1, #positive anchors).
BatchLossResult batch_detector_loss(const AnchorAssignment &assignment,
                                    std::span<const AnchorPrediction> preds,
                                    std::span<const BoxDeltas> reg_targets,
                                    const FocalConfig &focal,
                                    double smooth_l1_beta = kDefaultSmoothL1Beta);

}  // namespace mcpad

#endif  // MCPAD_LOSS_HPP
