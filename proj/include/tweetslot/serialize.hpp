#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"

namespace tweetslot {

// Little-endian primitives for the model container. Layout:
//   magic "TWSLOTMF" | u32 version | u32 kind | encoder config (6 x u64)
//   | kind-specific header | u32 tensor count | per tensor:
//   u32 name length, name bytes, u64 value count, values as f64.
inline constexpr char kModelMagic[8] = {'T', 'W', 'S', 'L', 'O', 'T', 'M', 'F'};
inline constexpr std::uint32_t kModelFormatVersion = 1;

class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void bytes(const void* data, std::size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void tensor(const std::string& name, std::span<const double> values) {
    str(name);
    u64(values.size());
    for (double v : values) f64(v);
  }

 private:
  void le(std::uint64_t v, int n) {
    unsigned char buf[8];
    for (int i = 0; i < n; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(buf, static_cast<std::size_t>(n));
  }
  std::ostream& out_;
};

class BinaryReader {
 public:
  BinaryReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  void bytes(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) fail("unexpected end of file");
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  double f64() { return std::bit_cast<double>(le(8)); }
  std::string str() {
    const auto n = u32();
    if (n > (1u << 20)) fail("string length " + std::to_string(n) + " too large");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  // Reads one tensor and checks its name and size against the destination.
  void tensor(const std::string& expected_name, std::span<double> dest) {
    const auto name = str();
    if (name != expected_name) fail("expected tensor '" + expected_name + "', found '" + name + "'");
    const auto n = u64();
    if (n != dest.size()) {
      fail("tensor '" + name + "' has " + std::to_string(n) + " values, expected " +
           std::to_string(dest.size()));
    }
    for (auto& v : dest) v = f64();
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError(source_ + ": " + what);
  }

 private:
  std::uint64_t le(int n) {
    unsigned char buf[8];
    bytes(buf, static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
  }
  std::istream& in_;
  std::string source_;
};

}  // namespace tweetslot
