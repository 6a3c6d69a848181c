#include <doctest.h>

#include <algorithm>

#include "mcpad/rng.hpp"
#include "mcpad/scoring.hpp"

using namespace mcpad;

namespace {

Detection det(ObjectClass label, double prob, int anchor = 0) {
  Detection d;
  d.label = label;
  d.probability = prob;
  d.box = {0, 0, 10, 10};
  d.anchor_index = anchor;
  return d;
}

}  // namespace

TEST_CASE("select_detection picks the maximum above threshold") {
  CHECK(!select_detection({}, 0.5).has_value());

  const std::vector<Detection> dets = {det(ObjectClass::non_face, 0.7, 1),
                                       det(ObjectClass::bonafide, 0.9, 2)};
  const auto best = select_detection(dets, 0.5);
  REQUIRE(best.has_value());
  CHECK(best->label == ObjectClass::bonafide);
  CHECK(best->probability == 0.9);

  // Nothing qualifies below the detection threshold.
  CHECK(!select_detection(dets, 0.95).has_value());
}

TEST_CASE("select_detection tie-breaks bonafide first, then anchor index") {
  const std::vector<Detection> tie = {det(ObjectClass::non_face, 0.6, 0),
                                      det(ObjectClass::bonafide, 0.6, 5)};
  const auto best = select_detection(tie, 0.5);
  REQUIRE(best.has_value());
  CHECK(best->label == ObjectClass::bonafide);

  const std::vector<Detection> same_class = {det(ObjectClass::bonafide, 0.6, 9),
                                             det(ObjectClass::bonafide, 0.6, 3)};
  CHECK(select_detection(same_class, 0.5)->anchor_index == 3);
}

TEST_CASE("select_detection is invariant under permutation") {
  Rng rng(88);
  std::vector<Detection> dets;
  for (int i = 0; i < 12; ++i)
    dets.push_back(det(rng.uniform01() < 0.5 ? ObjectClass::bonafide
                                             : ObjectClass::non_face,
                       rng.uniform(0.3, 0.95), i));
  const auto base = select_detection(dets, 0.4);
  REQUIRE(base.has_value());
  for (int trial = 0; trial < 30; ++trial) {
    for (std::size_t i = dets.size() - 1; i > 0; --i) {
      const auto j =
          static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)));
      std::swap(dets[i], dets[j]);
    }
    const auto got = select_detection(dets, 0.4);
    REQUIRE(got.has_value());
    CHECK(got->anchor_index == base->anchor_index);
    CHECK(got->probability == base->probability);
  }
}

TEST_CASE("pad_score follows the three scoring branches") {
  // Bonafide detection: score is the bonafide probability.
  const PadScore sb = pad_score(det(ObjectClass::bonafide, 0.8));
  CHECK(sb.value == 0.8);
  CHECK(sb.provenance == ScoreProvenance::bonafide_detection);

  // Non-face detection: score is one minus the non-face probability.
  const PadScore sn = pad_score(det(ObjectClass::non_face, 0.9));
  CHECK(sn.value == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(sn.provenance == ScoreProvenance::nonface_detection);

  // No detection: the predefined low score.
  const PadScore sf = pad_score(std::nullopt, 0.0);
  CHECK(sf.value == 0.0);
  CHECK(sf.provenance == ScoreProvenance::no_detection);
  CHECK(pad_score(std::nullopt, 0.07).value == 0.07);
}

TEST_CASE("pad_score stays in range and is antisymmetric") {
  Rng rng(90);
  for (int i = 0; i < 500; ++i) {
    const double p = rng.uniform01();
    const PadScore b = pad_score(det(ObjectClass::bonafide, p));
    const PadScore n = pad_score(det(ObjectClass::non_face, p));
    CHECK(b.value >= 0.0);
    CHECK(b.value <= 1.0);
    CHECK(n.value >= 0.0);
    CHECK(n.value <= 1.0);
    CHECK(b.value + n.value == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("aggregate_video mean and median") {
  const std::vector<PadScore> frames = {
      {0.2, ScoreProvenance::bonafide_detection},
      {0.4, ScoreProvenance::nonface_detection},
      {0.6, ScoreProvenance::bonafide_detection}};
  CHECK(aggregate_video(frames, AggregationRule::mean).value ==
        doctest::Approx(0.4).epsilon(1e-15));
  CHECK(aggregate_video(frames, AggregationRule::median).value == 0.4);

  const std::vector<PadScore> one = {{0.33, ScoreProvenance::no_detection}};
  CHECK(aggregate_video(one, AggregationRule::mean).value == 0.33);
  CHECK(aggregate_video(one, AggregationRule::median).value == 0.33);

  CHECK_THROWS_AS(aggregate_video({}, AggregationRule::mean), error);
}

TEST_CASE("aggregate mean equals brute-force sum over n") {
  Rng rng(91);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(1, 40));
    std::vector<PadScore> frames(n);
    double sum = 0.0;
    for (auto &f : frames) {
      f.value = rng.uniform01();
      sum += f.value;
    }
    CHECK(aggregate_video(frames, AggregationRule::mean).value ==
          doctest::Approx(sum / n).epsilon(1e-14));
  }
}
