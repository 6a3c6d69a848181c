#ifndef MCPAD_DETECTOR_HPP
#define MCPAD_DETECTOR_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mcpad/geometry.hpp"
#include "mcpad/image.hpp"
#include "mcpad/loss.hpp"

namespace mcpad {

// Hand-crafted per-anchor statistics over the composite image. Layout:
//   0..2   mean of plane p over the anchor's pixel support (gray, depth, ir)
//   3..5   population stddev of plane p
//   6..8   central-vs-border mean contrast of plane p (inner half-box
//          mean minus surrounding ring mean)
//   9..11  inter-plane mean differences: gray-depth, gray-ir, depth-ir
//   12     scale-match context: gray mean inside the anchor minus the mean
//          of the ring between the anchor and the anchor inflated 2x.
//          Near zero when the anchor sits inside a larger object, large
//          when the anchor frames an object against the background.
//   13     bias, always 1
inline constexpr int kFeatureDim = 14;

struct AnchorFeatures {
  std::array<double, kFeatureDim> v{};
};

// Integral-image accelerated extractor over one composite; extraction per
// anchor is O(1). The pixel support of an anchor is its box clipped to the
// image and snapped outward to whole pixels.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(const CompositeImage &img);

  // Throws degenerate_anchor_error when the anchor's pixel support is empty.
  AnchorFeatures extract(const BBox &anchor) const;

 private:
  int width_;
  int height_;
  // (width+1) x (height+1) running sums per plane; exact in uint64.
  std::array<std::vector<std::uint64_t>, 3> sum_;
  std::array<std::vector<std::uint64_t>, 3> sum_sq_;

  std::uint64_t box_sum(int plane, int x0, int y0, int x1, int y1) const;
  std::uint64_t box_sum_sq(int plane, int x0, int y0, int x1, int y1) const;
};

// One-off convenience wrapper around FeatureExtractor.
AnchorFeatures extract_features(const CompositeImage &img, const BBox &anchor);

// Per-dimension standardization fitted on the training set. Constant
// dimensions (stddev ~ 0, e.g. the bias) pass through untouched.
struct FeatureNorm {
  std::array<double, kFeatureDim> mean{};
  std::array<double, kFeatureDim> stddev{};

  AnchorFeatures apply(const AnchorFeatures &f) const;
};

// Weight layout: 6 rows of kFeatureDim (bonafide logit, non-face logit,
// then the four box-delta regressors), row-major.
inline constexpr int kWeightRows = 6;
inline constexpr int kParamCount = kWeightRows * kFeatureDim;

struct DetectorModel {
  AnchorGridConfig grid;
  FeatureNorm norm;
  std::vector<double> weights = std::vector<double>(kParamCount, 0.0);

  double weight(int row, int dim) const { return weights[row * kFeatureDim + dim]; }
};

struct Detection {
  ObjectClass label = ObjectClass::non_face;
  double probability = 0.0;
  BBox box;
  int anchor_index = -1;
};

inline constexpr double kDefaultDetectionThreshold = 0.5;

// Per-anchor inference: sigmoid class probabilities from the two linear
// heads plus the decoded (clipped) box. Anchors where both probabilities
// fall below det_threshold yield no Detection.
std::vector<Detection> forward(const DetectorModel &model,
                               const CompositeImage &img,
                               double det_threshold = kDefaultDetectionThreshold);

// ---------------------------------------------------------------------------
// Training

struct AdamConfig {
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int epochs = 50;
  std::uint64_t seed = 7;
};

// Adam learning rate for full-scale CNN variants of this detector
// (pretrained backbone, many minibatch steps). The linear reference heads
// stall at this step size; AdamConfig's default applies instead.
inline constexpr double kCnnScaleLearningRate = 2e-5;

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;

  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

// Standard bias-corrected Adam update, in place.
void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState &state, const AdamConfig &cfg);

struct TrainScene {
  CompositeImage image;
  std::vector<GroundTruth> truths;
};

struct TrainConfig {
  AdamConfig adam;
  FocalConfig focal;
  double smooth_l1_beta = kDefaultSmoothL1Beta;
  double pos_iou = kDefaultPosIouThreshold;
  double neg_iou = kDefaultNegIouThreshold;
  // Scenes per Adam step; one epoch sweeps the whole set in seeded
  // shuffled order.
  int batch_size = 8;
};

// Class-head bias initialization prior: every anchor starts predicting
// roughly this probability for each class, so the dense background does
// not drown the rare positives early in training.
inline constexpr double kDetectionPriorProb = 0.01;

// Precomputed per-scene tensors: anchor features, assignment, and encoded
// regression targets (valid at positive anchors).
struct SceneTensors {
  std::vector<AnchorFeatures> features;
  AnchorAssignment assignment;
  std::vector<BoxDeltas> reg_targets;
};

SceneTensors build_scene_tensors(const TrainScene &scene,
                                 std::span<const BBox> anchors,
                                 double pos_iou, double neg_iou);

FeatureNorm fit_feature_norm(std::span<const SceneTensors> scenes);

// Full-batch training objective over normalized scene tensors: the mean of
// per-scene batch_detector_loss. Exposed so gradients can be verified
// against finite differences of loss().
class TrainingProblem {
 public:
  TrainingProblem(std::vector<SceneTensors> scenes, FocalConfig focal,
                  double smooth_l1_beta);

  double loss(std::span<const double> weights) const;
  // Returns the loss; grad must have kParamCount entries.
  double loss_and_grad(std::span<const double> weights,
                       std::span<double> grad) const;

  // One scene's loss; its gradient (unnormalized by scene count) is added
  // into grad. Building block for minibatch steps.
  double accumulate_scene_grad(std::span<const double> weights,
                               std::size_t scene_index,
                               std::span<double> grad) const;

  std::size_t total_positive_anchors() const;
  const std::vector<SceneTensors> &scenes() const { return scenes_; }

 private:
  std::vector<SceneTensors> scenes_;
  FocalConfig focal_;
  double beta_;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_loss = 0.0;  // NaN when no validation set was given
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  int selected_epoch = 0;  // 1-based epoch whose weights were kept
};

// Full-batch Adam training. With a non-empty dev_set the returned model is
// the one with minimum validation loss (earliest epoch on ties), otherwise
// the final-epoch model. Deterministic for fixed inputs and seed. Throws
// unlearnable_dataset_error when no anchor is positive anywhere.
DetectorModel train(std::span<const TrainScene> train_set,
                    std::span<const TrainScene> dev_set,
                    const AnchorGridConfig &grid, const TrainConfig &cfg,
                    TrainLog *log = nullptr);

// Versioned binary model file (magic "MCPD"); round trips bit-exactly.
void save_model(const std::filesystem::path &path, const DetectorModel &model);
DetectorModel load_model(const std::filesystem::path &path);

}  // namespace mcpad

#endif  // MCPAD_DETECTOR_HPP
