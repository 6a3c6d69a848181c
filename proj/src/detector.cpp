#include "mcpad/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "mcpad/binio.hpp"
#include "mcpad/rng.hpp"

namespace mcpad {

namespace {

// Pixel support of a continuous box: clip to the image, snap outward.
struct PixelRect {
  int x0, y0, x1, y1;  // half-open
  int area() const { return (x1 - x0) * (y1 - y0); }
};

PixelRect pixel_support(const BBox &box, int width, int height) {
  PixelRect r;
  r.x0 = std::max(0, static_cast<int>(std::floor(box.x_min)));
  r.y0 = std::max(0, static_cast<int>(std::floor(box.y_min)));
  r.x1 = std::min(width, static_cast<int>(std::ceil(box.x_max)));
  r.y1 = std::min(height, static_cast<int>(std::ceil(box.y_max)));
  return r;
}

double dot(std::span<const double> weights, int row, const AnchorFeatures &f) {
  const double *w = weights.data() + static_cast<std::size_t>(row) * kFeatureDim;
  double acc = 0.0;
  for (int d = 0; d < kFeatureDim; ++d) acc += w[d] * f.v[d];
  return acc;
}

}  // namespace

FeatureExtractor::FeatureExtractor(const CompositeImage &img)
    : width_(img.width), height_(img.height) {
  const std::size_t stride = static_cast<std::size_t>(width_) + 1;
  for (int p = 0; p < 3; ++p) {
    sum_[p].assign(stride * (height_ + 1), 0);
    sum_sq_[p].assign(stride * (height_ + 1), 0);
    for (int y = 0; y < height_; ++y) {
      std::uint64_t row = 0, row_sq = 0;
      for (int x = 0; x < width_; ++x) {
        const std::uint64_t v = img.planes[p][static_cast<std::size_t>(y) * width_ + x];
        row += v;
        row_sq += v * v;
        sum_[p][(y + 1) * stride + (x + 1)] = sum_[p][y * stride + (x + 1)] + row;
        sum_sq_[p][(y + 1) * stride + (x + 1)] =
            sum_sq_[p][y * stride + (x + 1)] + row_sq;
      }
    }
  }
}

std::uint64_t FeatureExtractor::box_sum(int plane, int x0, int y0, int x1,
                                        int y1) const {
  const std::size_t s = static_cast<std::size_t>(width_) + 1;
  const auto &t = sum_[plane];
  return t[y1 * s + x1] - t[y0 * s + x1] - t[y1 * s + x0] + t[y0 * s + x0];
}

std::uint64_t FeatureExtractor::box_sum_sq(int plane, int x0, int y0, int x1,
                                           int y1) const {
  const std::size_t s = static_cast<std::size_t>(width_) + 1;
  const auto &t = sum_sq_[plane];
  return t[y1 * s + x1] - t[y0 * s + x1] - t[y1 * s + x0] + t[y0 * s + x0];
}

AnchorFeatures FeatureExtractor::extract(const BBox &anchor) const {
  if (!anchor.valid())
    throw degenerate_anchor_error("extract: anchor box has non-positive side");
  const PixelRect r = pixel_support(anchor, width_, height_);
  if (r.x1 <= r.x0 || r.y1 <= r.y0)
    throw degenerate_anchor_error("extract: anchor lies outside the image");

  AnchorFeatures f;
  const double area = r.area();
  double means[3];
  for (int p = 0; p < 3; ++p) {
    const double s1 = static_cast<double>(box_sum(p, r.x0, r.y0, r.x1, r.y1));
    const double s2 = static_cast<double>(box_sum_sq(p, r.x0, r.y0, r.x1, r.y1));
    const double mean = s1 / area;
    const double var = std::max(0.0, s2 / area - mean * mean);
    means[p] = mean;
    f.v[p] = mean;
    f.v[3 + p] = std::sqrt(var);
  }

  // Inner half-box: inset by a quarter of the support on each side.
  const int ix = (r.x1 - r.x0) / 4;
  const int iy = (r.y1 - r.y0) / 4;
  const PixelRect c{r.x0 + ix, r.y0 + iy, r.x1 - ix, r.y1 - iy};
  const int ring_area = r.area() - c.area();
  for (int p = 0; p < 3; ++p) {
    double contrast = 0.0;
    if (ring_area > 0 && c.area() > 0) {
      const double inner =
          static_cast<double>(box_sum(p, c.x0, c.y0, c.x1, c.y1)) / c.area();
      const double ring = (static_cast<double>(box_sum(p, r.x0, r.y0, r.x1, r.y1)) -
                           static_cast<double>(box_sum(p, c.x0, c.y0, c.x1, c.y1))) /
                          ring_area;
      contrast = inner - ring;
    }
    f.v[6 + p] = contrast;
  }

  f.v[9] = means[0] - means[1];
  f.v[10] = means[0] - means[2];
  f.v[11] = means[1] - means[2];

  // Scale-match context in the gray plane: anchor interior against the
  // ring out to the anchor inflated 1.6x (clipped to the image).
  const double grow_x = 0.5 * anchor.width();
  const double grow_y = 0.5 * anchor.height();
  const PixelRect outer = pixel_support(
      {anchor.x_min - grow_x, anchor.y_min - grow_y, anchor.x_max + grow_x,
       anchor.y_max + grow_y},
      width_, height_);
  const int ctx_ring_area = outer.area() - r.area();
  double context = 0.0;
  if (ctx_ring_area > 0) {
    const double outer_sum =
        static_cast<double>(box_sum(0, outer.x0, outer.y0, outer.x1, outer.y1));
    const double inner_sum =
        static_cast<double>(box_sum(0, r.x0, r.y0, r.x1, r.y1));
    context = means[0] - (outer_sum - inner_sum) / ctx_ring_area;
  }
  f.v[12] = context;
  f.v[13] = 1.0;
  return f;
}

AnchorFeatures extract_features(const CompositeImage &img, const BBox &anchor) {
  return FeatureExtractor(img).extract(anchor);
}

AnchorFeatures FeatureNorm::apply(const AnchorFeatures &f) const {
  AnchorFeatures out;
  for (int d = 0; d < kFeatureDim; ++d) {
    if (stddev[d] > 1e-12)
      out.v[d] = (f.v[d] - mean[d]) / stddev[d];
    else
      out.v[d] = f.v[d];  // constant dimension (e.g. bias): pass through
  }
  return out;
}

std::vector<Detection> forward(const DetectorModel &model,
                               const CompositeImage &img,
                               double det_threshold) {
  AnchorGridConfig grid = model.grid;
  grid.image_width = img.width;
  grid.image_height = img.height;
  const std::vector<BBox> anchors = generate_anchors(grid);

  const FeatureExtractor extractor(img);
  std::vector<Detection> dets;
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    const AnchorFeatures f = model.norm.apply(extractor.extract(anchors[a]));
    const double p_bona = sigmoid(dot(model.weights, 0, f));
    const double p_nonf = sigmoid(dot(model.weights, 1, f));
    if (p_bona < det_threshold && p_nonf < det_threshold) continue;

    const BoxDeltas deltas = {dot(model.weights, 2, f), dot(model.weights, 3, f),
                              dot(model.weights, 4, f), dot(model.weights, 5, f)};
    BBox box;
    try {
      box = decode_box(anchors[a], deltas, img.width, img.height);
    } catch (const invalid_box_error &) {
      continue;  // decoded box collapsed outside the image
    }

    Detection d;
    d.label = p_bona >= p_nonf ? ObjectClass::bonafide : ObjectClass::non_face;
    d.probability = std::max(p_bona, p_nonf);
    d.box = box;
    d.anchor_index = static_cast<int>(a);
    dets.push_back(d);
  }
  return dets;
}

void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState &state, const AdamConfig &cfg) {
  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }
}

SceneTensors build_scene_tensors(const TrainScene &scene,
                                 std::span<const BBox> anchors,
                                 double pos_iou, double neg_iou) {
  SceneTensors t;
  const FeatureExtractor extractor(scene.image);
  t.features.reserve(anchors.size());
  for (const BBox &a : anchors) t.features.push_back(extractor.extract(a));
  t.assignment = assign_anchors(anchors, scene.truths, pos_iou, neg_iou);
  t.reg_targets.assign(anchors.size(), BoxDeltas{0, 0, 0, 0});
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    if (t.assignment.labels[a] == AnchorLabel::positive)
      t.reg_targets[a] =
          encode_box(anchors[a], scene.truths[t.assignment.matched_gt[a]].box);
  }
  return t;
}

FeatureNorm fit_feature_norm(std::span<const SceneTensors> scenes) {
  FeatureNorm norm;
  std::size_t n = 0;
  std::array<double, kFeatureDim> sum{};
  for (const auto &s : scenes)
    for (const auto &f : s.features) {
      ++n;
      for (int d = 0; d < kFeatureDim; ++d) sum[d] += f.v[d];
    }
  for (int d = 0; d < kFeatureDim; ++d)
    norm.mean[d] = n > 0 ? sum[d] / static_cast<double>(n) : 0.0;

  std::array<double, kFeatureDim> sq{};
  for (const auto &s : scenes)
    for (const auto &f : s.features)
      for (int d = 0; d < kFeatureDim; ++d) {
        const double c = f.v[d] - norm.mean[d];
        sq[d] += c * c;
      }
  for (int d = 0; d < kFeatureDim; ++d)
    norm.stddev[d] = n > 0 ? std::sqrt(sq[d] / static_cast<double>(n)) : 0.0;
  return norm;
}

TrainingProblem::TrainingProblem(std::vector<SceneTensors> scenes,
                                 FocalConfig focal, double smooth_l1_beta)
    : scenes_(std::move(scenes)), focal_(focal), beta_(smooth_l1_beta) {}

std::size_t TrainingProblem::total_positive_anchors() const {
  std::size_t n = 0;
  for (const auto &s : scenes_) n += s.assignment.positive_count();
  return n;
}

double TrainingProblem::loss(std::span<const double> weights) const {
  double total = 0.0;
  for (const auto &s : scenes_) {
    std::vector<AnchorPrediction> preds(s.features.size());
    for (std::size_t a = 0; a < s.features.size(); ++a) {
      preds[a].prob_bonafide = sigmoid(dot(weights, 0, s.features[a]));
      preds[a].prob_non_face = sigmoid(dot(weights, 1, s.features[a]));
      for (int j = 0; j < 4; ++j)
        preds[a].deltas[j] = dot(weights, 2 + j, s.features[a]);
    }
    total += batch_detector_loss(s.assignment, preds, s.reg_targets, focal_, beta_)
                 .total;
  }
  return total / static_cast<double>(std::max<std::size_t>(1, scenes_.size()));
}

double TrainingProblem::accumulate_scene_grad(std::span<const double> weights,
                                              std::size_t scene_index,
                                              std::span<double> grad) const {
  const SceneTensors &s = scenes_[scene_index];
  const std::size_t n_anchors = s.features.size();
  const double pos_norm = static_cast<double>(
      std::max<std::size_t>(1, s.assignment.positive_count()));
  double cls_sum = 0.0, reg_sum = 0.0;

  for (std::size_t a = 0; a < n_anchors; ++a) {
    const AnchorLabel label = s.assignment.labels[a];
    if (label == AnchorLabel::ignore) continue;
    const AnchorFeatures &f = s.features[a];

    BinaryLabel y_bona = BinaryLabel::negative;
    BinaryLabel y_nonf = BinaryLabel::negative;
    if (label == AnchorLabel::positive) {
      if (s.assignment.cls[a] == ObjectClass::bonafide)
        y_bona = BinaryLabel::positive;
      else
        y_nonf = BinaryLabel::positive;
    }

    const double logit_b = dot(weights, 0, f);
    const double logit_n = dot(weights, 1, f);
    cls_sum += focal_loss(sigmoid(logit_b), y_bona, focal_);
    cls_sum += focal_loss(sigmoid(logit_n), y_nonf, focal_);

    const double gb = focal_loss_grad(logit_b, y_bona, focal_) / pos_norm;
    const double gn = focal_loss_grad(logit_n, y_nonf, focal_) / pos_norm;
    for (int d = 0; d < kFeatureDim; ++d) {
      grad[0 * kFeatureDim + d] += gb * f.v[d];
      grad[1 * kFeatureDim + d] += gn * f.v[d];
    }

    if (label == AnchorLabel::positive) {
      BoxDeltas pred;
      for (int j = 0; j < 4; ++j) pred[j] = dot(weights, 2 + j, f);
      reg_sum += smooth_l1(pred, s.reg_targets[a], beta_);
      const BoxDeltas dg = smooth_l1_grad(pred, s.reg_targets[a], beta_);
      for (int j = 0; j < 4; ++j) {
        const double gr = dg[j] / pos_norm;
        for (int d = 0; d < kFeatureDim; ++d)
          grad[(2 + j) * kFeatureDim + d] += gr * f.v[d];
      }
    }
  }
  // Same division structure as batch_detector_loss so loss() and the
  // gradient paths agree bitwise on the loss value.
  return cls_sum / pos_norm + reg_sum / pos_norm;
}

double TrainingProblem::loss_and_grad(std::span<const double> weights,
                                      std::span<double> grad) const {
  std::fill(grad.begin(), grad.end(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < scenes_.size(); ++i)
    total += accumulate_scene_grad(weights, i, grad);
  const double scene_norm =
      static_cast<double>(std::max<std::size_t>(1, scenes_.size()));
  for (double &g : grad) g /= scene_norm;
  return total / scene_norm;
}

DetectorModel train(std::span<const TrainScene> train_set,
                    std::span<const TrainScene> dev_set,
                    const AnchorGridConfig &grid, const TrainConfig &cfg,
                    TrainLog *log) {
  if (train_set.empty())
    throw unlearnable_dataset_error("train: empty training set");

  const std::vector<BBox> anchors = generate_anchors(grid);

  std::vector<SceneTensors> train_tensors;
  train_tensors.reserve(train_set.size());
  for (const TrainScene &s : train_set)
    train_tensors.push_back(
        build_scene_tensors(s, anchors, cfg.pos_iou, cfg.neg_iou));

  std::size_t positives = 0;
  for (const auto &t : train_tensors) positives += t.assignment.positive_count();
  if (positives == 0)
    throw unlearnable_dataset_error(
        "train: no positive anchor in the entire training set");

  const FeatureNorm norm = fit_feature_norm(train_tensors);
  for (auto &t : train_tensors)
    for (auto &f : t.features) f = norm.apply(f);

  std::vector<SceneTensors> dev_tensors;
  dev_tensors.reserve(dev_set.size());
  for (const TrainScene &s : dev_set) {
    SceneTensors t = build_scene_tensors(s, anchors, cfg.pos_iou, cfg.neg_iou);
    for (auto &f : t.features) f = norm.apply(f);
    dev_tensors.push_back(std::move(t));
  }

  const TrainingProblem train_problem(std::move(train_tensors), cfg.focal,
                                      cfg.smooth_l1_beta);
  const TrainingProblem dev_problem(std::move(dev_tensors), cfg.focal,
                                    cfg.smooth_l1_beta);
  const bool has_dev = !dev_problem.scenes().empty();

  // Small seeded init, with the class-head biases set to the detection
  // prior so dense background anchors start nearly classified.
  Rng rng(cfg.adam.seed);
  std::vector<double> weights(kParamCount);
  for (double &w : weights) w = rng.normal(0.0, 0.01);
  const double prior_bias =
      -std::log((1.0 - kDetectionPriorProb) / kDetectionPriorProb);
  weights[0 * kFeatureDim + (kFeatureDim - 1)] = prior_bias;
  weights[1 * kFeatureDim + (kFeatureDim - 1)] = prior_bias;

  AdamState state(kParamCount);
  std::vector<double> grad(kParamCount, 0.0);
  std::vector<double> best_weights = weights;
  double best_dev = std::numeric_limits<double>::infinity();
  int best_epoch = 0;

  if (log) {
    log->epochs.clear();
    log->selected_epoch = 0;
  }

  const std::size_t n_scenes = train_problem.scenes().size();
  const std::size_t batch = std::min<std::size_t>(
      n_scenes, static_cast<std::size_t>(std::max(1, cfg.batch_size)));
  std::vector<std::size_t> order(n_scenes);
  for (std::size_t i = 0; i < n_scenes; ++i) order[i] = i;

  for (int epoch = 1; epoch <= cfg.adam.epochs; ++epoch) {
    // Seeded per-epoch shuffle keeps runs reproducible.
    Rng shuffle_rng(mix_seed(cfg.adam.seed, static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = n_scenes - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(
          shuffle_rng.uniform_int(0, static_cast<std::int64_t>(i)));
      std::swap(order[i], order[j]);
    }

    // Linearly decayed step size settles the final weights instead of
    // oscillating around the optimum at a constant rate.
    AdamConfig step_cfg = cfg.adam;
    step_cfg.learning_rate =
        cfg.adam.learning_rate *
        (1.0 - 0.9 * static_cast<double>(epoch - 1) /
                   static_cast<double>(std::max(1, cfg.adam.epochs)));
    for (std::size_t start = 0; start < n_scenes; start += batch) {
      const std::size_t end = std::min(n_scenes, start + batch);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t k = start; k < end; ++k)
        train_problem.accumulate_scene_grad(weights, order[k], grad);
      const double inv = 1.0 / static_cast<double>(end - start);
      for (double &g : grad) g *= inv;
      adam_step(weights, grad, state, step_cfg);
    }

    const double train_loss = train_problem.loss(weights);
    double dev_loss = std::numeric_limits<double>::quiet_NaN();
    if (has_dev) {
      dev_loss = dev_problem.loss(weights);
      if (dev_loss < best_dev) {
        best_dev = dev_loss;
        best_weights = weights;
        best_epoch = epoch;
      }
    }
    if (log) log->epochs.push_back({epoch, train_loss, dev_loss});
  }

  DetectorModel model;
  model.grid = grid;
  model.norm = norm;
  model.weights = has_dev ? best_weights : weights;
  if (log) log->selected_epoch = has_dev ? best_epoch : cfg.adam.epochs;
  return model;
}

// ---------------------------------------------------------------------------
// MCPD model file

namespace {
constexpr char kModelMagic[4] = {'M', 'C', 'P', 'D'};
constexpr std::uint16_t kModelVersion = 1;
}  // namespace

void save_model(const std::filesystem::path &path, const DetectorModel &model) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw data_error("cannot open for writing: " + path.string());
  os.write(kModelMagic, 4);
  binio::write_u16(os, kModelVersion);
  binio::write_f64(os, model.grid.stride);
  binio::write_u32(os, static_cast<std::uint32_t>(model.grid.image_width));
  binio::write_u32(os, static_cast<std::uint32_t>(model.grid.image_height));
  binio::write_u32(os, static_cast<std::uint32_t>(model.grid.scales.size()));
  for (double s : model.grid.scales) binio::write_f64(os, s);
  binio::write_u32(os, static_cast<std::uint32_t>(model.grid.ratios.size()));
  for (double r : model.grid.ratios) binio::write_f64(os, r);
  binio::write_u32(os, kFeatureDim);
  for (double m : model.norm.mean) binio::write_f64(os, m);
  for (double s : model.norm.stddev) binio::write_f64(os, s);
  binio::write_u32(os, static_cast<std::uint32_t>(model.weights.size()));
  for (double w : model.weights) binio::write_f64(os, w);
  if (!os) throw data_error("write failed: " + path.string());
}

DetectorModel load_model(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw data_error("cannot open: " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kModelMagic, 4) != 0)
    throw corrupt_input_error("MCPD: bad magic in " + path.string());
  const std::uint16_t version = binio::read_u16(is, "version");
  if (version != kModelVersion)
    throw corrupt_input_error("MCPD: unsupported version in " + path.string());

  DetectorModel model;
  model.grid.stride = binio::read_f64(is, "stride");
  model.grid.image_width = static_cast<int>(binio::read_u32(is, "image width"));
  model.grid.image_height = static_cast<int>(binio::read_u32(is, "image height"));
  const std::uint32_t n_scales = binio::read_u32(is, "scale count");
  model.grid.scales.resize(n_scales);
  for (auto &s : model.grid.scales) s = binio::read_f64(is, "scale");
  const std::uint32_t n_ratios = binio::read_u32(is, "ratio count");
  model.grid.ratios.resize(n_ratios);
  for (auto &r : model.grid.ratios) r = binio::read_f64(is, "ratio");

  const std::uint32_t dim = binio::read_u32(is, "feature dim");
  if (dim != kFeatureDim)
    throw corrupt_input_error("MCPD: feature dimension mismatch in " +
                              path.string());
  for (auto &m : model.norm.mean) m = binio::read_f64(is, "feature mean");
  for (auto &s : model.norm.stddev) s = binio::read_f64(is, "feature stddev");

  const std::uint32_t n_weights = binio::read_u32(is, "weight count");
  if (n_weights != kParamCount)
    throw corrupt_input_error("MCPD: weight count mismatch in " + path.string());
  model.weights.resize(n_weights);
  for (auto &w : model.weights) w = binio::read_f64(is, "weight");

  is.peek();
  if (!is.eof())
    throw corrupt_input_error("MCPD: trailing bytes in " + path.string());
  return model;
}

}  // namespace mcpad
