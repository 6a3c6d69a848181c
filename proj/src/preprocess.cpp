#include "mcpad/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mcpad {

namespace {

// Mean of the two central order statistics for even length.
double median_of_sorted(const std::vector<std::uint16_t> &v) {
  const std::size_t n = v.size();
  if (n % 2 == 1) return static_cast<double>(v[n / 2]);
  return (static_cast<double>(v[n / 2 - 1]) + static_cast<double>(v[n / 2])) / 2.0;
}

double median_of_sorted(const std::vector<double> &v) {
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

std::uint8_t clamp_round_u8(double v) {
  // Clamp first, then round half-up.
  const double c = std::min(255.0, std::max(0.0, v));
  return static_cast<std::uint8_t>(std::floor(c + 0.5));
}

}  // namespace

MadStats compute_mad(const RawChannel16 &ch) {
  std::vector<std::uint16_t> v;
  v.reserve(ch.data.size());
  for (std::uint16_t px : ch.data)
    if (px != 0) v.push_back(px);

  MadStats s;
  s.nonzero_count = v.size();
  if (v.empty()) return s;

  std::sort(v.begin(), v.end());
  s.median = median_of_sorted(v);

  std::vector<double> dev(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    dev[i] = std::abs(static_cast<double>(v[i]) - s.median);
  std::sort(dev.begin(), dev.end());
  s.mad = median_of_sorted(dev);
  return s;
}

double normalized_value(std::uint16_t raw, const MadStats &stats,
                        const NormConfig &cfg) {
  const double scale = cfg.sigma * stats.mad;
  return (static_cast<double>(raw) - stats.median + scale) / (2.0 * scale) * 255.0;
}

PlaneU8 normalize_channel(const RawChannel16 &ch, const MadStats &stats,
                          const NormConfig &cfg) {
  PlaneU8 out(ch.width, ch.height);
  if (stats.mad == 0.0) {
    // Constant (or empty) channel: no spread to normalize by, emit mid-scale.
    std::fill(out.data.begin(), out.data.end(), std::uint8_t{128});
    return out;
  }
  for (std::size_t i = 0; i < ch.data.size(); ++i)
    out.data[i] = clamp_round_u8(normalized_value(ch.data[i], stats, cfg));
  return out;
}

PlaneU8 to_grayscale(const RgbImage &color) {
  PlaneU8 out(color.width, color.height);
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    const double y = 0.299 * color.planes[0][i] + 0.587 * color.planes[1][i] +
                     0.114 * color.planes[2][i];
    out.data[i] = clamp_round_u8(y);
  }
  return out;
}

CompositeImage make_composite(const PlaneU8 &gray, const PlaneU8 &depth8,
                              const PlaneU8 &ir8) {
  if (gray.width != depth8.width || gray.height != depth8.height ||
      gray.width != ir8.width || gray.height != ir8.height)
    throw dimension_mismatch_error(
        "composite planes disagree on dimensions (unsynchronized capture?)");
  CompositeImage img;
  img.width = gray.width;
  img.height = gray.height;
  img.planes[0] = gray.data;
  img.planes[1] = depth8.data;
  img.planes[2] = ir8.data;
  return img;
}

CompositeImage preprocess_frame(const RawFrame &frame, const NormConfig &cfg) {
  const PlaneU8 gray = to_grayscale(frame.color);
  const PlaneU8 depth8 =
      normalize_channel(frame.depth, compute_mad(frame.depth), cfg);
  const PlaneU8 ir8 = normalize_channel(frame.ir, compute_mad(frame.ir), cfg);
  return make_composite(gray, depth8, ir8);
}

}  // namespace mcpad
