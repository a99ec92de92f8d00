#include "mdelta/codec.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mdelta/error.hpp"

namespace mdelta {

namespace {

constexpr int kPrecision = 62;
constexpr std::uint64_t kTop = std::uint64_t{1} << kPrecision;       // interval length 1
constexpr std::uint64_t kHalf = std::uint64_t{1} << (kPrecision - 1);
constexpr std::uint64_t kWindowMask = kTop - 1;

std::uint64_t quantize_zero(double p0) {
  constexpr double kScale = 4294967296.0;  // 2^32
  double scaled = std::nearbyint(p0 * kScale);
  if (!(scaled >= 1.0)) scaled = 1.0;
  if (scaled > kScale - 1.0) scaled = kScale - 1.0;
  return static_cast<std::uint64_t>(scaled);
}

std::uint64_t split_point(std::uint64_t range, double p0) {
  // floor(range * q / 2^32) without a 128-bit product: range < 2^62, q < 2^32.
  const std::uint64_t q = quantize_zero(p0);
  return (range >> 32) * q + (((range & 0xffffffffULL) * q) >> 32);
}

void propagate_carry(Bits& out) {
  for (auto it = out.rbegin(); it != out.rend(); ++it) {
    if (*it == 0) {
      *it = 1;
      return;
    }
    *it = 0;
  }
  throw std::logic_error("arithmetic coder carried past the first bit");
}

}  // namespace

Bits encode(SequentialCoder& coder, BitView x) {
  coder.reset();
  Bits out;
  std::uint64_t low = 0;
  std::uint64_t range = kTop;
  for (Bit b : x) {
    const std::uint64_t split = split_point(range, coder.prob(0));
    if (b) {
      low += split;
      range -= split;
    } else {
      range = split;
    }
    coder.update(b);
    if (low >= kTop) {
      low -= kTop;
      propagate_carry(out);
    }
    while (range <= kHalf) {
      out.push_back(static_cast<Bit>((low >> (kPrecision - 1)) & 1U));
      low = (low << 1) & kWindowMask;
      range <<= 1;
    }
  }
  // Shortest dyadic point of [low, low + range) at or below the window scale.
  for (int j = 0; j <= kPrecision; ++j) {
    const std::uint64_t unit = std::uint64_t{1} << (kPrecision - j);
    const std::uint64_t point = ((low + unit - 1) / unit) * unit;
    if (point - low < range) {
      if (point == kTop) {
        propagate_carry(out);
      } else {
        for (int k = 1; k <= j; ++k) out.push_back(static_cast<Bit>((point >> (kPrecision - k)) & 1U));
      }
      break;
    }
  }
  while (!out.empty() && out.back() == 0) out.pop_back();
  return out;
}

Bits decode(SequentialCoder& coder, BitView codeword, std::size_t n) {
  if (!codeword.empty() && codeword.back() == 0) throw DecodeError("codeword ends in a zero bit (non-canonical)");
  coder.reset();
  std::size_t pos = 0;
  auto next_bit = [&]() -> std::uint64_t { return pos < codeword.size() ? codeword[pos++] : (++pos, 0U); };
  std::uint64_t diff = 0;  // code value minus interval low, in window units
  for (int i = 0; i < kPrecision; ++i) diff = (diff << 1) | next_bit();
  std::uint64_t range = kTop;
  Bits out(n);
  for (std::size_t t = 0; t < n; ++t) {
    const std::uint64_t split = split_point(range, coder.prob(0));
    Bit b = 0;
    if (diff < split) {
      range = split;
    } else {
      b = 1;
      diff -= split;
      range -= split;
    }
    out[t] = b;
    coder.update(b);
    while (range <= kHalf) {
      range <<= 1;
      diff = (diff << 1) | next_bit();
    }
  }
  if (encode(coder, out) != Bits(codeword.begin(), codeword.end())) {
    throw DecodeError("bitstream is not the canonical codeword of any length-" + std::to_string(n) + " sequence");
  }
  return out;
}

std::vector<std::uint8_t> pack_bits(BitView bits) {
  std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80U >> (i % 8));
  }
  return out;
}

Bits unpack_bits(std::span<const std::uint8_t> bytes, std::size_t nbits) {
  if (nbits > bytes.size() * 8) throw DecodeError("packed input holds fewer bits than requested");
  Bits out(nbits);
  for (std::size_t i = 0; i < nbits; ++i) out[i] = (bytes[i / 8] >> (7 - i % 8)) & 1U;
  return out;
}

std::vector<std::uint8_t> write_stream(const Stream& stream) {
  std::vector<std::uint8_t> out{'M', 'D', stream.header.version, stream.header.ell};
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(stream.header.n >> shift));
  const auto payload = pack_bits(stream.codeword);
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Stream read_stream(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) throw DecodeError("stream shorter than its 8-byte header");
  if (bytes[0] != 'M' || bytes[1] != 'D') throw DecodeError("bad stream magic");
  Stream s;
  s.header.version = bytes[2];
  if (s.header.version != StreamHeader::kVersion) {
    throw DecodeError("unsupported stream version " + std::to_string(s.header.version));
  }
  s.header.ell = bytes[3];
  s.header.n = (std::uint32_t{bytes[4]} << 24) | (std::uint32_t{bytes[5]} << 16) | (std::uint32_t{bytes[6]} << 8) |
               std::uint32_t{bytes[7]};
  const auto payload = bytes.subspan(8);
  std::size_t nbits = payload.size() * 8;
  while (nbits > 0 && ((payload[(nbits - 1) / 8] >> (7 - (nbits - 1) % 8)) & 1U) == 0) --nbits;
  if (payload.size() != (nbits + 7) / 8) throw DecodeError("stream has trailing zero bytes after the codeword");
  s.codeword = unpack_bits(payload, nbits);
  return s;
}

}  // namespace mdelta
