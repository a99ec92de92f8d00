#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mdelta/bits.hpp"
#include "mdelta/coders.hpp"

namespace mdelta {

// Binary arithmetic codec over a 62-bit integer interval with carry
// propagation into the already-emitted bits. Next-bit probabilities are
// quantized to 32 bits before splitting, so encoder and decoder agree
// bit-for-bit.
//
// Termination: the codeword is the shortest bit string w such that the value
// 0.w000... lies in the final interval; trailing zeros are never emitted.
// The decoder is told n out of band, reads missing bits as zero, and rejects
// any input that is not the canonical codeword of what it decoded.
//
// |encode(x)| <= ceil(-log2 q(x)) + 2.
Bits encode(SequentialCoder& coder, BitView x);
Bits decode(SequentialCoder& coder, BitView codeword, std::size_t n);

// Container: 8-byte header then the codeword packed MSB-first, zero padded.
//   bytes 0-1  magic "MD"
//   byte  2    version (1)
//   byte  3    context depth ell
//   bytes 4-7  n, big-endian
// The payload length is recovered from the position of the last 1 bit.
struct StreamHeader {
  static constexpr std::uint8_t kVersion = 1;
  std::uint8_t version = kVersion;
  std::uint8_t ell = 0;
  std::uint32_t n = 0;
};

struct Stream {
  StreamHeader header;
  Bits codeword;
};

std::vector<std::uint8_t> write_stream(const Stream& stream);
// Throws DecodeError on a bad magic, unknown version, or short header.
Stream read_stream(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> pack_bits(BitView bits);
Bits unpack_bits(std::span<const std::uint8_t> bytes, std::size_t nbits);

}  // namespace mdelta
