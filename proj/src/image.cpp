#include "mcpad/image.hpp"

#include <fstream>

#include "mcpad/binio.hpp"

namespace mcpad {

namespace {

constexpr char kMagic[4] = {'M', 'C', '1', '6'};

void validate_header(const Mc16Data &d) {
  if (d.width == 0 || d.height == 0)
    throw corrupt_input_error("MC16: zero width or height");
  if (d.plane_count == 0) throw corrupt_input_error("MC16: zero plane count");
  if (d.bit_depth != 8 && d.bit_depth != 16)
    throw corrupt_input_error("MC16: bit depth must be 8 or 16");
}

}  // namespace

void save_mc16(const std::filesystem::path &path, const Mc16Data &data) {
  validate_header(data);
  const std::size_t expected =
      static_cast<std::size_t>(data.width) * data.height * data.plane_count;
  if (data.samples.size() != expected)
    throw corrupt_input_error("MC16: sample count does not match header");

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw data_error("cannot open for writing: " + path.string());
  os.write(kMagic, 4);
  binio::write_u16(os, data.width);
  binio::write_u16(os, data.height);
  binio::write_u16(os, data.plane_count);
  binio::write_u16(os, data.bit_depth);
  if (data.bit_depth == 16) {
    for (std::uint16_t s : data.samples) binio::write_u16(os, s);
  } else {
    for (std::uint16_t s : data.samples) {
      const char b = static_cast<char>(s & 0xff);
      os.write(&b, 1);
    }
  }
  if (!os) throw data_error("write failed: " + path.string());
}

Mc16Data load_mc16(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw data_error("cannot open: " + path.string());

  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw corrupt_input_error("MC16: bad magic in " + path.string());

  Mc16Data d;
  d.width = binio::read_u16(is, "width");
  d.height = binio::read_u16(is, "height");
  d.plane_count = binio::read_u16(is, "plane count");
  d.bit_depth = binio::read_u16(is, "bit depth");
  validate_header(d);

  const std::size_t n =
      static_cast<std::size_t>(d.width) * d.height * d.plane_count;
  d.samples.resize(n);
  if (d.bit_depth == 16) {
    std::vector<char> buf(n * 2);
    if (!is.read(buf.data(), static_cast<std::streamsize>(buf.size())))
      throw corrupt_input_error("MC16: truncated payload in " + path.string());
    for (std::size_t i = 0; i < n; ++i) {
      const auto lo = static_cast<unsigned char>(buf[2 * i]);
      const auto hi = static_cast<unsigned char>(buf[2 * i + 1]);
      d.samples[i] = static_cast<std::uint16_t>(lo | (hi << 8));
    }
  } else {
    std::vector<char> buf(n);
    if (!is.read(buf.data(), static_cast<std::streamsize>(buf.size())))
      throw corrupt_input_error("MC16: truncated payload in " + path.string());
    for (std::size_t i = 0; i < n; ++i)
      d.samples[i] = static_cast<unsigned char>(buf[i]);
  }
  // Trailing bytes mean the header lied about the payload.
  is.peek();
  if (!is.eof())
    throw corrupt_input_error("MC16: trailing bytes in " + path.string());
  return d;
}

void save_mc16(const std::filesystem::path &path, const RawChannel16 &ch) {
  Mc16Data d;
  d.width = static_cast<std::uint16_t>(ch.width);
  d.height = static_cast<std::uint16_t>(ch.height);
  d.plane_count = 1;
  d.bit_depth = 16;
  d.samples = ch.data;
  save_mc16(path, d);
}

void save_mc16(const std::filesystem::path &path, const RgbImage &img) {
  Mc16Data d;
  d.width = static_cast<std::uint16_t>(img.width);
  d.height = static_cast<std::uint16_t>(img.height);
  d.plane_count = 3;
  d.bit_depth = 8;
  d.samples.reserve(static_cast<std::size_t>(img.width) * img.height * 3);
  for (const auto &plane : img.planes)
    for (std::uint8_t v : plane) d.samples.push_back(v);
  save_mc16(path, d);
}

void save_mc16(const std::filesystem::path &path, const CompositeImage &img) {
  Mc16Data d;
  d.width = static_cast<std::uint16_t>(img.width);
  d.height = static_cast<std::uint16_t>(img.height);
  d.plane_count = 3;
  d.bit_depth = 8;
  d.samples.reserve(static_cast<std::size_t>(img.width) * img.height * 3);
  for (const auto &plane : img.planes)
    for (std::uint8_t v : plane) d.samples.push_back(v);
  save_mc16(path, d);
}

RawChannel16 load_mc16_channel16(const std::filesystem::path &path) {
  const Mc16Data d = load_mc16(path);
  if (d.plane_count != 1 || d.bit_depth != 16)
    throw corrupt_input_error("MC16: expected 1 plane of 16-bit data in " +
                              path.string());
  RawChannel16 ch(d.width, d.height);
  ch.data = d.samples;
  return ch;
}

RgbImage load_mc16_rgb(const std::filesystem::path &path) {
  const Mc16Data d = load_mc16(path);
  if (d.plane_count != 3 || d.bit_depth != 8)
    throw corrupt_input_error("MC16: expected 3 planes of 8-bit data in " +
                              path.string());
  RgbImage img(d.width, d.height);
  const std::size_t plane_px = static_cast<std::size_t>(d.width) * d.height;
  for (int p = 0; p < 3; ++p)
    for (std::size_t i = 0; i < plane_px; ++i)
      img.planes[p][i] = static_cast<std::uint8_t>(d.samples[p * plane_px + i]);
  return img;
}

CompositeImage load_mc16_composite(const std::filesystem::path &path) {
  const Mc16Data d = load_mc16(path);
  if (d.plane_count != 3 || d.bit_depth != 8)
    throw corrupt_input_error("MC16: expected 3 planes of 8-bit data in " +
                              path.string());
  CompositeImage img;
  img.width = d.width;
  img.height = d.height;
  const std::size_t plane_px = static_cast<std::size_t>(d.width) * d.height;
  for (int p = 0; p < 3; ++p) {
    img.planes[p].resize(plane_px);
    for (std::size_t i = 0; i < plane_px; ++i)
      img.planes[p][i] = static_cast<std::uint8_t>(d.samples[p * plane_px + i]);
  }
  return img;
}

}  // namespace mcpad
