#ifndef MCPAD_BINIO_HPP
#define MCPAD_BINIO_HPP

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "mcpad/errors.hpp"

// Little-endian binary serialization helpers shared by the MC16 frame
// container and the MCPD model format.

namespace mcpad::binio {

inline void write_u16(std::ostream &os, std::uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>(v >> 8)};
  os.write(reinterpret_cast<const char *>(b), 2);
}

inline void write_u32(std::ostream &os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char *>(b), 4);
}

inline void write_u64(std::ostream &os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char *>(b), 8);
}

// memcpy between double and u64 yields the same integer value on any
// host endianness, so writing that value LE is portable as-is.
inline void write_f64(std::ostream &os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  write_u64(os, bits);
}

inline std::uint16_t read_u16(std::istream &is, const char *what) {
  unsigned char b[2];
  if (!is.read(reinterpret_cast<char *>(b), 2))
    throw corrupt_input_error(std::string("truncated input while reading ") + what);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

inline std::uint32_t read_u32(std::istream &is, const char *what) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char *>(b), 4))
    throw corrupt_input_error(std::string("truncated input while reading ") + what);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

inline std::uint64_t read_u64(std::istream &is, const char *what) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char *>(b), 8))
    throw corrupt_input_error(std::string("truncated input while reading ") + what);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

inline double read_f64(std::istream &is, const char *what) {
  std::uint64_t bits = read_u64(is, what);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace mcpad::binio

#endif  // MCPAD_BINIO_HPP
