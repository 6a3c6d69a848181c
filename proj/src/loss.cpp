#include "mcpad/loss.hpp"

#include <algorithm>
#include <cmath>

namespace mcpad {

double p_t(double p, BinaryLabel y) {
  return y == BinaryLabel::positive ? p : 1.0 - p;
}

double alpha_t(BinaryLabel y, const FocalConfig &cfg) {
  return y == BinaryLabel::positive ? cfg.alpha : 1.0 - cfg.alpha;
}

double cross_entropy(double p, BinaryLabel y) {
  return -std::log(clamp_prob(p_t(p, y)));
}

double focal_loss_pt(double pt, double alpha_t, double gamma) {
  pt = clamp_prob(pt);
  return -alpha_t * std::pow(1.0 - pt, gamma) * std::log(pt);
}

double focal_loss(double p, BinaryLabel y, const FocalConfig &cfg) {
  return focal_loss_pt(p_t(p, y), alpha_t(y, cfg), cfg.gamma);
}

double focal_loss_grad(double logit, BinaryLabel y, const FocalConfig &cfg) {
  const double p = sigmoid(logit);
  const double pt = p_t(p, y);
  // The clamped forward is constant once pt leaves (eps, 1-eps).
  if (pt <= kProbEpsilon || pt >= 1.0 - kProbEpsilon) return 0.0;
  const double at = alpha_t(y, cfg);
  const double sign = y == BinaryLabel::positive ? 1.0 : -1.0;
  // dFL/dlogit = a_t * sign * (1-pt)^g * (g * pt * ln(pt) - (1 - pt)),
  // using dp_t/dlogit = sign * pt * (1 - pt).
  return at * sign * std::pow(1.0 - pt, cfg.gamma) *
         (cfg.gamma * pt * std::log(pt) - (1.0 - pt));
}

double smooth_l1(const BoxDeltas &pred, const BoxDeltas &target, double beta) {
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double d = std::abs(pred[i] - target[i]);
    sum += d < beta ? 0.5 * d * d / beta : d - 0.5 * beta;
  }
  return sum;
}

BoxDeltas smooth_l1_grad(const BoxDeltas &pred, const BoxDeltas &target,
                         double beta) {
  BoxDeltas g;
  for (int i = 0; i < 4; ++i) {
    const double d = pred[i] - target[i];
    if (std::abs(d) < beta)
      g[i] = d / beta;
    else
      g[i] = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
  }
  return g;
}

BatchLossResult batch_detector_loss(const AnchorAssignment &assignment,
                                    std::span<const AnchorPrediction> preds,
                                    std::span<const BoxDeltas> reg_targets,
                                    const FocalConfig &focal,
                                    double smooth_l1_beta) {
  const std::size_t n = assignment.size();
  double cls_sum = 0.0;
  double reg_sum = 0.0;
  std::size_t positives = 0;

  for (std::size_t a = 0; a < n; ++a) {
    const AnchorLabel label = assignment.labels[a];
    if (label == AnchorLabel::ignore) continue;

    BinaryLabel y_bona = BinaryLabel::negative;
    BinaryLabel y_nonf = BinaryLabel::negative;
    if (label == AnchorLabel::positive) {
      ++positives;
      if (assignment.cls[a] == ObjectClass::bonafide)
        y_bona = BinaryLabel::positive;
      else
        y_nonf = BinaryLabel::positive;
    }
    cls_sum += focal_loss(preds[a].prob_bonafide, y_bona, focal);
    cls_sum += focal_loss(preds[a].prob_non_face, y_nonf, focal);

    if (label == AnchorLabel::positive)
      reg_sum += smooth_l1(preds[a].deltas, reg_targets[a], smooth_l1_beta);
  }

  const double norm = static_cast<double>(std::max<std::size_t>(1, positives));
  BatchLossResult r;
  r.classification = cls_sum / norm;
  r.regression = reg_sum / norm;
  r.total = r.classification + r.regression;
  return r;
}

}  // namespace mcpad
