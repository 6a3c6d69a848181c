#ifndef MCPAD_GEOMETRY_HPP
#define MCPAD_GEOMETRY_HPP

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "mcpad/errors.hpp"

namespace mcpad {

// Axis-aligned box in continuous pixel coordinates; sides must be positive.
struct BBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  double center_x() const { return (x_min + x_max) / 2.0; }
  double center_y() const { return (y_min + y_max) / 2.0; }
  bool valid() const { return x_max > x_min && y_max > y_min; }
};

// Intersection over union; 0 for disjoint boxes.
double iou(const BBox &a, const BBox &b);

// Dense anchor grid over a full image (background included). Anchors are
// centered on stride cells; side lengths come from scales, shapes from
// h/w aspect ratios. Anchors may extend past the image borders.
struct AnchorGridConfig {
  // Stride 8 keeps every generated face reachable at IoU >= 0.5; the
  // scale ladder brackets the generator's face sizes so no anchor scale
  // can sit entirely inside a face unnoticed.
  double stride = 8.0;
  std::vector<double> scales = {48.0, 68.0, 96.0};
  std::vector<double> ratios = {1.0, 1.3};  // h / w
  int image_width = 128;
  int image_height = 128;
};

// One anchor per (cell, scale, ratio); cells iterate row-major with x
// fastest, scales then ratios innermost. For scale s and ratio r the box
// has area s^2 with w = s/sqrt(r), h = s*sqrt(r).
std::vector<BBox> generate_anchors(const AnchorGridConfig &grid);

enum class ObjectClass { bonafide, non_face };

struct GroundTruth {
  BBox box;
  ObjectClass cls = ObjectClass::bonafide;
};

enum class AnchorLabel { positive, negative, ignore };

// Per-anchor assignment result; matched_gt and cls are meaningful only for
// positive anchors.
struct AnchorAssignment {
  std::vector<AnchorLabel> labels;
  std::vector<int> matched_gt;
  std::vector<ObjectClass> cls;

  std::size_t size() const { return labels.size(); }
  std::size_t positive_count() const;
};

inline constexpr double kDefaultPosIouThreshold = 0.5;
inline constexpr double kDefaultNegIouThreshold = 0.4;

// IoU-threshold assignment: positive at max-IoU >= pos_thr (class of the
// highest-IoU ground truth), negative below neg_thr, ignore in between.
// Every ground truth additionally forces its single best anchor positive,
// ties broken by lowest anchor index. Requires pos_thr >= neg_thr.
AnchorAssignment assign_anchors(std::span<const BBox> anchors,
                                std::span<const GroundTruth> gt,
                                double pos_thr = kDefaultPosIouThreshold,
                                double neg_thr = kDefaultNegIouThreshold);

using BoxDeltas = std::array<double, 4>;

// Regression target of gt relative to anchor:
//   (dx/w_a, dy/h_a, ln(w_g/w_a), ln(h_g/h_a))
BoxDeltas encode_box(const BBox &anchor, const BBox &gt);

// Inverse of encode_box, unclipped.
BBox decode_box(const BBox &anchor, const BoxDeltas &deltas);

// Inverse of encode_box, clipped to [0,image_w]x[0,image_h]. Throws
// invalid_box_error when the clipped box has a non-positive side.
BBox decode_box(const BBox &anchor, const BoxDeltas &deltas, int image_w,
                int image_h);

}  // namespace mcpad

#endif  // MCPAD_GEOMETRY_HPP
