#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

#include "lid/errors.hpp"

// Little-endian primitives for the model container. Doubles travel as raw
// IEEE-754 bits so loaded models score bit-identically to saved ones.

namespace lid::detail {

class BinaryWriter {
 public:
  explicit BinaryWriter(std::string& sink) : sink_(sink) {}

  void u8(std::uint8_t v) { sink_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
      sink_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
      sink_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view v) {
    u32(static_cast<std::uint32_t>(v.size()));
    sink_.append(v);
  }

 private:
  std::string& sink_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::string_view data) : data_(data) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
  std::uint32_t u32() {
    const auto bytes = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i]))
           << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    const auto bytes = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i]))
           << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    return std::string(take(n));
  }
  bool exhausted() const { return pos_ == data_.size(); }

 private:
  std::string_view take(std::size_t n) {
    if (data_.size() - pos_ < n)
      throw ModelIoError("model file truncated or malformed");
    std::string_view v = data_.substr(pos_, n);
    pos_ += n;
    return v;
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace lid::detail
