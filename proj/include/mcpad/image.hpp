#ifndef MCPAD_IMAGE_HPP
#define MCPAD_IMAGE_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "mcpad/errors.hpp"

namespace mcpad {

// Single 8-bit plane, row-major.
struct PlaneU8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  PlaneU8() = default;
  PlaneU8(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t &at(int x, int y) {
    return data[static_cast<std::size_t>(y) * width + x];
  }
};

// Raw 16-bit sensor channel (depth or infrared), row-major.
struct RawChannel16 {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> data;

  RawChannel16() = default;
  RawChannel16(int w, int h, std::uint16_t fill = 0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  std::uint16_t at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  std::uint16_t &at(int x, int y) {
    return data[static_cast<std::size_t>(y) * width + x];
  }
};

// 8-bit color image stored as three planes in R, G, B order.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::array<std::vector<std::uint8_t>, 3> planes;  // r, g, b

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h) {
    for (auto &p : planes) p.assign(static_cast<std::size_t>(w) * h, 0);
  }

  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const std::size_t i = static_cast<std::size_t>(y) * width + x;
    planes[0][i] = r;
    planes[1][i] = g;
    planes[2][i] = b;
  }
};

// Detector input: three 8-bit planes in the fixed order grayscale,
// normalized depth, normalized infrared.
struct CompositeImage {
  int width = 0;
  int height = 0;
  std::array<std::vector<std::uint8_t>, 3> planes;  // gray, depth, ir

  std::uint8_t at(int plane, int x, int y) const {
    return planes[plane][static_cast<std::size_t>(y) * width + x];
  }
};

// One synchronized multi-channel capture.
struct RawFrame {
  RawChannel16 depth;
  RawChannel16 ir;
  RgbImage color;
};

// ---------------------------------------------------------------------------
// MC16 container: 12-byte header (magic "MC16", u16 LE width, u16 height,
// u16 plane-count, u16 bit-depth in {8,16}) followed by plane-major,
// row-major little-endian samples.

struct Mc16Data {
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  std::uint16_t plane_count = 0;
  std::uint16_t bit_depth = 0;
  // Samples in plane-major order; for bit_depth 8 each value fits a byte.
  std::vector<std::uint16_t> samples;
};

void save_mc16(const std::filesystem::path &path, const Mc16Data &data);
Mc16Data load_mc16(const std::filesystem::path &path);

// Typed wrappers. Loaders throw corrupt_input_error when the container's
// plane-count/bit-depth do not match the expected channel kind.
void save_mc16(const std::filesystem::path &path, const RawChannel16 &ch);
void save_mc16(const std::filesystem::path &path, const RgbImage &img);
void save_mc16(const std::filesystem::path &path, const CompositeImage &img);
RawChannel16 load_mc16_channel16(const std::filesystem::path &path);
RgbImage load_mc16_rgb(const std::filesystem::path &path);
CompositeImage load_mc16_composite(const std::filesystem::path &path);

}  // namespace mcpad

#endif  // MCPAD_IMAGE_HPP
