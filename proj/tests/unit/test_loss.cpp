#include <doctest.h>

#include <cmath>

#include "mcpad/loss.hpp"
#include "mcpad/rng.hpp"
#include "oracles.hpp"

using namespace mcpad;

TEST_CASE("p_t branches") {
  CHECK(p_t(0.7, BinaryLabel::positive) == 0.7);
  CHECK(p_t(0.7, BinaryLabel::negative) == doctest::Approx(0.3).epsilon(1e-15));
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const double p = rng.uniform01();
    for (BinaryLabel y : {BinaryLabel::positive, BinaryLabel::negative}) {
      const double pt = p_t(p, y);
      CHECK(pt >= 0.0);
      CHECK(pt <= 1.0);
    }
  }
}

TEST_CASE("cross entropy fixed values") {
  CHECK(cross_entropy(0.5, BinaryLabel::positive) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(cross_entropy(0.5, BinaryLabel::negative) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(cross_entropy(0.9, BinaryLabel::positive) ==
        doctest::Approx(0.105360515657826).epsilon(1e-12));
  CHECK(cross_entropy(0.9, BinaryLabel::negative) ==
        doctest::Approx(2.302585092994046).epsilon(1e-12));
  // Clamping keeps the loss finite at the boundary probabilities.
  CHECK(std::isfinite(cross_entropy(0.0, BinaryLabel::positive)));
  CHECK(std::isfinite(cross_entropy(1.0, BinaryLabel::negative)));
}

TEST_CASE("focal loss reduces to cross entropy at gamma 0, alpha_t 1") {
  Rng rng(17);
  for (int i = 0; i < 1000; ++i) {
    const double p = rng.uniform01();
    const BinaryLabel y =
        rng.uniform01() < 0.5 ? BinaryLabel::positive : BinaryLabel::negative;
    const double fl = focal_loss_pt(p_t(p, y), 1.0, 0.0);
    CHECK(std::abs(fl - cross_entropy(p, y)) < 1e-12);
  }
}

TEST_CASE("focal loss fixed value and limits") {
  // (1 - 0.9)^2 * -ln(0.9) with full alpha weight on the positive class.
  const double fl = focal_loss(0.9, BinaryLabel::positive, {1.0, 2.0});
  CHECK(fl == doctest::Approx(0.0010536051565783).epsilon(1e-10));

  // Well-classified limit: p_t -> 1 drives the loss to 0.
  CHECK(focal_loss(1.0 - 1e-9, BinaryLabel::positive, {0.25, 2.0}) <
        focal_loss(0.99, BinaryLabel::positive, {0.25, 2.0}));
  CHECK(focal_loss(1.0, BinaryLabel::positive, {0.25, 2.0}) < 1e-12);
}

TEST_CASE("focal loss is nonnegative, decreasing in p_t, below CE") {
  Rng rng(23);
  for (int i = 0; i < 500; ++i) {
    const double gamma = rng.uniform(0.0, 5.0);
    double prev = std::numeric_limits<double>::infinity();
    for (double pt = 0.02; pt < 1.0; pt += 0.02) {
      const double fl = focal_loss_pt(pt, 1.0, gamma);
      CHECK(fl >= 0.0);
      CHECK(fl < prev);  // strictly decreasing in p_t
      CHECK(fl <= -std::log(pt) + 1e-15);  // modulating factor <= 1
      prev = fl;
    }
  }
}

TEST_CASE("focal gradient matches known closed form at gamma 0") {
  Rng rng(29);
  for (int i = 0; i < 200; ++i) {
    const double logit = rng.uniform(-8.0, 8.0);
    const double p = sigmoid(logit);
    // alpha_t = 1 for the checked label: alpha = 1 weights the positive
    // class fully, alpha = 0.5 halves both.
    const double g = focal_loss_grad(logit, BinaryLabel::positive, {1.0, 0.0});
    CHECK(g == doctest::Approx(p - 1.0).epsilon(1e-12));
    const double gn = focal_loss_grad(logit, BinaryLabel::negative, {0.5, 0.0});
    CHECK(gn == doctest::Approx(0.5 * p).epsilon(1e-12));
  }
}

TEST_CASE("focal gradient matches central differences") {
  Rng rng(31);
  const double h = 1e-5;
  for (int i = 0; i < 1000; ++i) {
    const double logit = rng.uniform(-12.0, 12.0);
    const BinaryLabel y =
        rng.uniform01() < 0.5 ? BinaryLabel::positive : BinaryLabel::negative;
    const FocalConfig cfg{rng.uniform(0.05, 1.0), rng.uniform(0.0, 4.0)};

    const double analytic = focal_loss_grad(logit, y, cfg);
    const double numeric = oracle::central_difference(
        [&](double z) { return focal_loss(sigmoid(z), y, cfg); }, logit, h);
    if (std::abs(numeric) < 1e-9 && std::abs(analytic) < 1e-9) continue;
    CHECK(oracle::relative_error(analytic, numeric) < 1e-6);
  }
}

TEST_CASE("focal gradient vanishes for well-classified samples") {
  CHECK(std::abs(focal_loss_grad(40.0, BinaryLabel::positive, {0.25, 2.0})) <
        1e-12);
  CHECK(std::abs(focal_loss_grad(-40.0, BinaryLabel::negative, {0.25, 2.0})) <
        1e-12);
}

TEST_CASE("smooth L1 value and boundary") {
  const double beta = kDefaultSmoothL1Beta;
  const BoxDeltas zero = {0, 0, 0, 0};
  CHECK(smooth_l1(zero, zero, beta) == 0.0);

  // At |d| == beta both branches meet at beta/2.
  CHECK(smooth_l1({beta, 0, 0, 0}, zero, beta) ==
        doctest::Approx(0.5 * beta).epsilon(1e-12));
  // Continuity across the transition.
  const double below = smooth_l1({beta - 1e-9, 0, 0, 0}, zero, beta);
  const double above = smooth_l1({beta + 1e-9, 0, 0, 0}, zero, beta);
  CHECK(std::abs(below - above) < 1e-8);
}

TEST_CASE("smooth L1 gradient matches central differences") {
  Rng rng(37);
  const double h = 1e-5;
  for (int trial = 0; trial < 1000; ++trial) {
    const double beta = rng.uniform(0.02, 1.0);
    BoxDeltas pred, target;
    for (int j = 0; j < 4; ++j) {
      pred[j] = rng.uniform(-2.0, 2.0);
      target[j] = rng.uniform(-2.0, 2.0);
      // Keep clear of the non-smooth transition point.
      if (std::abs(std::abs(pred[j] - target[j]) - beta) < 10 * h)
        pred[j] += 20 * h;
    }
    const BoxDeltas g = smooth_l1_grad(pred, target, beta);
    for (int j = 0; j < 4; ++j) {
      const double numeric = oracle::central_difference(
          [&](double v) {
            BoxDeltas p = pred;
            p[j] = v;
            return smooth_l1(p, target, beta);
          },
          pred[j], h);
      if (std::abs(numeric) < 1e-9 && std::abs(g[j]) < 1e-9) continue;
      CHECK(oracle::relative_error(g[j], numeric) < 1e-6);
    }
  }
}

namespace {

AnchorAssignment toy_assignment() {
  AnchorAssignment asg;
  asg.labels = {AnchorLabel::positive, AnchorLabel::negative, AnchorLabel::ignore};
  asg.matched_gt = {0, -1, -1};
  asg.cls = {ObjectClass::bonafide, ObjectClass::non_face, ObjectClass::non_face};
  return asg;
}

}  // namespace

TEST_CASE("batch loss equals hand-summed per-anchor losses") {
  const AnchorAssignment asg = toy_assignment();
  const FocalConfig focal{0.25, 2.0};
  const double beta = kDefaultSmoothL1Beta;

  std::vector<AnchorPrediction> preds(3);
  preds[0] = {0.8, 0.3, {0.1, -0.2, 0.05, 0.0}};
  preds[1] = {0.4, 0.6, {0.0, 0.0, 0.0, 0.0}};
  preds[2] = {0.9, 0.9, {1.0, 1.0, 1.0, 1.0}};  // ignored
  std::vector<BoxDeltas> targets = {{0.0, 0.1, 0.0, -0.1}, {0, 0, 0, 0}, {0, 0, 0, 0}};

  // Anchor 0 is a bonafide positive, anchor 1 background, anchor 2 ignored.
  const double expect_cls =
      focal_loss(0.8, BinaryLabel::positive, focal) +
      focal_loss(0.3, BinaryLabel::negative, focal) +
      focal_loss(0.4, BinaryLabel::negative, focal) +
      focal_loss(0.6, BinaryLabel::negative, focal);
  const double expect_reg = smooth_l1(preds[0].deltas, targets[0], beta);

  const BatchLossResult r = batch_detector_loss(asg, preds, targets, focal, beta);
  CHECK(r.classification == doctest::Approx(expect_cls).epsilon(1e-14));
  CHECK(r.regression == doctest::Approx(expect_reg).epsilon(1e-14));
  CHECK(r.total == doctest::Approx(expect_cls + expect_reg).epsilon(1e-14));
}

TEST_CASE("batch loss guards zero positives and rewards perfection") {
  AnchorAssignment asg;
  asg.labels = {AnchorLabel::negative, AnchorLabel::negative};
  asg.matched_gt = {-1, -1};
  asg.cls = {ObjectClass::non_face, ObjectClass::non_face};
  std::vector<AnchorPrediction> preds(2);
  preds[0] = {0.2, 0.1, {0, 0, 0, 0}};
  preds[1] = {0.3, 0.2, {0, 0, 0, 0}};
  std::vector<BoxDeltas> targets(2, BoxDeltas{0, 0, 0, 0});

  const BatchLossResult r =
      batch_detector_loss(asg, preds, targets, {0.25, 2.0}, 1.0 / 9.0);
  CHECK(r.regression == 0.0);
  CHECK(r.classification > 0.0);  // normalizer 1, not 0

  // Single positive anchor, nearly perfect prediction: loss tends to 0.
  AnchorAssignment one;
  one.labels = {AnchorLabel::positive};
  one.matched_gt = {0};
  one.cls = {ObjectClass::bonafide};
  std::vector<AnchorPrediction> good(1);
  good[0] = {1.0 - 1e-9, 1e-9, {0, 0, 0, 0}};
  std::vector<BoxDeltas> t1(1, BoxDeltas{0, 0, 0, 0});
  const BatchLossResult perfect =
      batch_detector_loss(one, good, t1, {0.25, 2.0}, 1.0 / 9.0);
  CHECK(perfect.total < 1e-10);
}
