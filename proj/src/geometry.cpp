#include "mcpad/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace mcpad {

double iou(const BBox &a, const BBox &b) {
  const double ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  return inter / (a.area() + b.area() - inter);
}

std::vector<BBox> generate_anchors(const AnchorGridConfig &grid) {
  const int cols = static_cast<int>(std::ceil(grid.image_width / grid.stride));
  const int rows = static_cast<int>(std::ceil(grid.image_height / grid.stride));
  std::vector<BBox> anchors;
  anchors.reserve(static_cast<std::size_t>(cols) * rows * grid.scales.size() *
                  grid.ratios.size());
  for (int row = 0; row < rows; ++row) {
    for (int col = 0; col < cols; ++col) {
      const double cx = (col + 0.5) * grid.stride;
      const double cy = (row + 0.5) * grid.stride;
      for (double scale : grid.scales) {
        for (double ratio : grid.ratios) {
          const double w = scale / std::sqrt(ratio);
          const double h = scale * std::sqrt(ratio);
          anchors.push_back(
              {cx - w / 2.0, cy - h / 2.0, cx + w / 2.0, cy + h / 2.0});
        }
      }
    }
  }
  return anchors;
}

std::size_t AnchorAssignment::positive_count() const {
  std::size_t n = 0;
  for (AnchorLabel l : labels)
    if (l == AnchorLabel::positive) ++n;
  return n;
}

AnchorAssignment assign_anchors(std::span<const BBox> anchors,
                                std::span<const GroundTruth> gt,
                                double pos_thr, double neg_thr) {
  if (pos_thr < neg_thr)
    throw error("assign_anchors: pos_thr must be >= neg_thr");

  AnchorAssignment out;
  out.labels.assign(anchors.size(), AnchorLabel::negative);
  out.matched_gt.assign(anchors.size(), -1);
  out.cls.assign(anchors.size(), ObjectClass::non_face);
  if (gt.empty()) return out;

  std::vector<double> best_iou_for_gt(gt.size(), -1.0);
  std::vector<int> best_anchor_for_gt(gt.size(), -1);

  for (std::size_t a = 0; a < anchors.size(); ++a) {
    double best = 0.0;
    int best_gt = -1;
    for (std::size_t g = 0; g < gt.size(); ++g) {
      const double v = iou(anchors[a], gt[g].box);
      if (v > best) {
        best = v;
        best_gt = static_cast<int>(g);
      }
      if (v > best_iou_for_gt[g]) {
        best_iou_for_gt[g] = v;
        best_anchor_for_gt[g] = static_cast<int>(a);
      }
    }
    if (best >= pos_thr && best_gt >= 0) {
      out.labels[a] = AnchorLabel::positive;
      out.matched_gt[a] = best_gt;
      out.cls[a] = gt[best_gt].cls;
    } else if (best < neg_thr) {
      out.labels[a] = AnchorLabel::negative;
    } else {
      out.labels[a] = AnchorLabel::ignore;
    }
  }

  // Force-match: every ground truth keeps its single best anchor positive,
  // processed in gt order so the outcome is deterministic.
  for (std::size_t g = 0; g < gt.size(); ++g) {
    const int a = best_anchor_for_gt[g];
    if (a < 0) continue;
    out.labels[a] = AnchorLabel::positive;
    out.matched_gt[a] = static_cast<int>(g);
    out.cls[a] = gt[g].cls;
  }
  return out;
}

BoxDeltas encode_box(const BBox &anchor, const BBox &gt) {
  const double wa = anchor.width();
  const double ha = anchor.height();
  return {(gt.center_x() - anchor.center_x()) / wa,
          (gt.center_y() - anchor.center_y()) / ha,
          std::log(gt.width() / wa), std::log(gt.height() / ha)};
}

BBox decode_box(const BBox &anchor, const BoxDeltas &deltas) {
  const double wa = anchor.width();
  const double ha = anchor.height();
  const double cx = anchor.center_x() + deltas[0] * wa;
  const double cy = anchor.center_y() + deltas[1] * ha;
  const double w = wa * std::exp(deltas[2]);
  const double h = ha * std::exp(deltas[3]);
  return {cx - w / 2.0, cy - h / 2.0, cx + w / 2.0, cy + h / 2.0};
}

BBox decode_box(const BBox &anchor, const BoxDeltas &deltas, int image_w,
                int image_h) {
  BBox b = decode_box(anchor, deltas);
  b.x_min = std::clamp(b.x_min, 0.0, static_cast<double>(image_w));
  b.y_min = std::clamp(b.y_min, 0.0, static_cast<double>(image_h));
  b.x_max = std::clamp(b.x_max, 0.0, static_cast<double>(image_w));
  b.y_max = std::clamp(b.y_max, 0.0, static_cast<double>(image_h));
  if (!b.valid())
    throw invalid_box_error("decode_box: degenerate box after clipping");
  return b;
}

}  // namespace mcpad
