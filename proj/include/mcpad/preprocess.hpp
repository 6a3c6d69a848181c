#ifndef MCPAD_PREPROCESS_HPP
#define MCPAD_PREPROCESS_HPP

#include <cstddef>

#include "mcpad/image.hpp"

namespace mcpad {

// Robust statistics of a raw channel, computed over its strictly nonzero
// pixels (zeros are background holes and dead pixels).
struct MadStats {
  double median = 0.0;
  double mad = 0.0;  // median absolute deviation, >= 0
  std::size_t nonzero_count = 0;
};

struct NormConfig {
  double sigma = 4.0;  // > 0
};

// Median and MAD over the nonzero pixels of the channel. An even-length
// vector takes the mean of the two central order statistics. A channel
// with no nonzero pixels yields median = mad = 0.
MadStats compute_mad(const RawChannel16 &ch);

// The pre-clamp real-valued mapping of one pixel:
//   (raw - median + sigma*mad) / (2*sigma*mad) * 255
// Requires stats.mad > 0.
double normalized_value(std::uint16_t raw, const MadStats &stats,
                        const NormConfig &cfg);

// Full 16-bit -> 8-bit plane normalization: map every pixel (zeros
// included) through normalized_value, clamp to [0,255], round half-up.
// A degenerate channel (mad == 0) maps to the constant 128.
PlaneU8 normalize_channel(const RawChannel16 &ch, const MadStats &stats,
                          const NormConfig &cfg);

// BT.601 luma: round(0.299 R + 0.587 G + 0.114 B), clamped to [0,255].
PlaneU8 to_grayscale(const RgbImage &color);

// Stack three equally sized planes in the fixed order (gray, depth, ir).
// Throws dimension_mismatch_error when the planes disagree on size.
CompositeImage make_composite(const PlaneU8 &gray, const PlaneU8 &depth8,
                              const PlaneU8 &ir8);

// Convenience: grayscale conversion plus per-frame MAD normalization of
// depth and infrared, stacked into the composite.
CompositeImage preprocess_frame(const RawFrame &frame, const NormConfig &cfg);

}  // namespace mcpad

#endif  // MCPAD_PREPROCESS_HPP
