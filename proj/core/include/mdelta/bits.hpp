#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mdelta {

using Bit = std::uint8_t;
using Bits = std::vector<Bit>;
using BitView = std::span<const Bit>;

// Parses a string of '0'/'1' characters. Throws PreconditionError on any other
// character.
Bits parse_bits(std::string_view text);
std::string format_bits(BitView bits);

// Largest context length addressable by a 32-bit state index.
inline constexpr int kMaxContextLength = 24;

// A binary context written in time order: the last character is the most
// recent bit. `bits` holds the same string as an integer whose least
// significant bit is the most recent symbol, so the length-k suffix of a
// context is `bits & ((1 << k) - 1)`.
struct Context {
  std::uint32_t bits = 0;
  int length = 0;

  static Context parse(std::string_view text);
  std::string to_string() const;

  // Suffix of length k <= length.
  Context suffix(int k) const;
  bool is_suffix_of(const Context& other) const;

  friend auto operator<=>(const Context&, const Context&) = default;
};

inline std::uint32_t depth_mask(int depth) {
  return depth >= 32 ? ~std::uint32_t{0} : ((std::uint32_t{1} << depth) - 1U);
}

// Index of the state formed by the last `depth` bits of `history`.
std::uint32_t trailing_state(BitView history, int depth);

// The finite tail of a fixed semi-infinite past. Only its last `memory` bits
// ever matter, so callers supply at least that many.
class Past {
 public:
  Past() = default;
  explicit Past(Bits bits) : bits_(std::move(bits)) {}

  static Past zeros(std::size_t length) { return Past(Bits(length, 0)); }
  static Past parse(std::string_view text) { return Past(parse_bits(text)); }

  std::size_t size() const noexcept { return bits_.size(); }
  BitView bits() const noexcept { return bits_; }

  // State index of the last `depth` bits; throws PreconditionError when the
  // past is shorter than `depth`.
  std::uint32_t state(int depth) const;
  void require(int depth, std::string_view what) const;

  friend bool operator==(const Past&, const Past&) = default;

 private:
  Bits bits_;
};

}  // namespace mdelta
