#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mcpad/image.hpp"
#include "mcpad/rng.hpp"

using namespace mcpad;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char *name) {
  return fs::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("MC16 round trips 16-bit and 8-bit payloads bit-exactly") {
  Rng rng(99);
  const fs::path p = temp_file("mcpad_io_test.mc16");

  for (int trial = 0; trial < 8; ++trial) {
    Mc16Data d;
    d.width = static_cast<std::uint16_t>(rng.uniform_int(1, 37));
    d.height = static_cast<std::uint16_t>(rng.uniform_int(1, 29));
    d.plane_count = static_cast<std::uint16_t>(rng.uniform_int(1, 4));
    d.bit_depth = rng.uniform01() < 0.5 ? 16 : 8;
    const std::size_t n =
        static_cast<std::size_t>(d.width) * d.height * d.plane_count;
    d.samples.resize(n);
    const int max = d.bit_depth == 16 ? 65535 : 255;
    for (auto &s : d.samples)
      s = static_cast<std::uint16_t>(rng.uniform_int(0, max));

    save_mc16(p, d);
    const Mc16Data back = load_mc16(p);
    CHECK(back.width == d.width);
    CHECK(back.height == d.height);
    CHECK(back.plane_count == d.plane_count);
    CHECK(back.bit_depth == d.bit_depth);
    CHECK(back.samples == d.samples);
  }
  fs::remove(p);
}

TEST_CASE("MC16 typed wrappers round trip") {
  Rng rng(100);
  const fs::path p = temp_file("mcpad_io_typed.mc16");

  RawChannel16 ch(9, 7);
  for (auto &v : ch.data) v = static_cast<std::uint16_t>(rng.uniform_int(0, 65535));
  save_mc16(p, ch);
  const RawChannel16 ch2 = load_mc16_channel16(p);
  CHECK(ch2.width == 9);
  CHECK(ch2.height == 7);
  CHECK(ch2.data == ch.data);

  RgbImage img(5, 6);
  for (auto &plane : img.planes)
    for (auto &v : plane) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  save_mc16(p, img);
  const RgbImage img2 = load_mc16_rgb(p);
  CHECK(img2.planes == img.planes);

  // A 3-plane 8-bit file is not a 16-bit channel.
  CHECK_THROWS_AS(load_mc16_channel16(p), corrupt_input_error);

  // Composites persist in the same container: 3 planes, bit depth 8.
  CompositeImage comp;
  comp.width = 7;
  comp.height = 4;
  for (auto &plane : comp.planes) {
    plane.resize(28);
    for (auto &v : plane) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  }
  save_mc16(p, comp);
  const CompositeImage comp2 = load_mc16_composite(p);
  CHECK(comp2.width == comp.width);
  CHECK(comp2.planes == comp.planes);
  fs::remove(p);
}

TEST_CASE("MC16 rejects corrupt containers") {
  const fs::path p = temp_file("mcpad_io_bad.mc16");

  {
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    os << "NOPE";
  }
  CHECK_THROWS_AS(load_mc16(p), corrupt_input_error);

  {
    // Valid header promising more samples than the payload carries.
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    const unsigned char header[] = {'M', 'C', '1', '6', 4, 0, 4, 0, 1, 0, 16, 0};
    os.write(reinterpret_cast<const char *>(header), sizeof header);
    os << "shrt";
  }
  CHECK_THROWS_AS(load_mc16(p), corrupt_input_error);

  CHECK_THROWS_AS(load_mc16(temp_file("mcpad_does_not_exist.mc16")), data_error);
  fs::remove(p);
}
