#pragma once

// Separate source/channel coding reference chain:
// 7-bit ASCII -> (7,4) Hamming -> Gray 16-QAM -> channel -> hard decision
// -> syndrome correction -> text.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vlfsim/channel.hpp"
#include "vlfsim/feature_frame.hpp"
#include "vlfsim/metrics.hpp"

namespace vlfsim {

struct BitStream {
  std::vector<std::uint8_t> bits;  // one bit per byte, values 0/1
  std::size_t pad_len = 0;         // trailing zero bits appended for block alignment

  std::size_t size() const noexcept { return bits.size(); }
  std::size_t payload_size() const noexcept { return bits.size() - pad_len; }
};

struct AsciiEncoding {
  BitStream stream;
  std::size_t substitutions = 0;  // code points above 127 replaced by '?'
};

// Seven bits per character, MSB first.
AsciiEncoding ascii_encode(std::string_view text);
// Control characters other than newline and tab decode to '?'.
// FramingError unless the payload length is a multiple of 7.
std::string ascii_decode(const BitStream& bits);

namespace hamming74 {

// Systematic G = [I4 | A]; codeword bit order d0 d1 d2 d3 p0 p1 p2 with
// p0 = d0^d1^d3, p1 = d0^d2^d3, p2 = d1^d2^d3.
inline constexpr std::array<std::array<std::uint8_t, 7>, 4> kGenerator{{
    {1, 0, 0, 0, 1, 1, 0},
    {0, 1, 0, 0, 1, 0, 1},
    {0, 0, 1, 0, 0, 1, 1},
    {0, 0, 0, 1, 1, 1, 1},
}};

// H = [A^T | I3].
inline constexpr std::array<std::array<std::uint8_t, 7>, 3> kParityCheck{{
    {1, 1, 0, 1, 1, 0, 0},
    {1, 0, 1, 1, 0, 1, 0},
    {0, 1, 1, 1, 0, 0, 1},
}};

using Word = std::array<std::uint8_t, 4>;
using Codeword = std::array<std::uint8_t, 7>;

Codeword encode_block(const Word& data);
std::uint8_t syndrome(const Codeword& received);

struct BlockDecode {
  Word data;
  std::uint8_t syndrome = 0;  // s0 s1 s2 packed MSB first; 0 means clean
};
// Flips the bit whose H column equals the syndrome, then reads d0..d3.
BlockDecode decode_block(const Codeword& received);

}  // namespace hamming74

// Zero-pads to a multiple of 4 (recorded in pad_len) and encodes each block.
BitStream hamming74_encode(const BitStream& data);
// Corrects single-bit errors per block and strips pad_len bits.
// FramingError unless the length is a multiple of 7.
BitStream hamming74_decode(const BitStream& coded);

namespace qam16 {

// Per-axis Gray map: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3, scaled by 1/sqrt(10).
inline constexpr std::array<int, 4> kLevelForPair{-3, -1, 3, 1};

double scale() noexcept;
// label = b0 b1 b2 b3 (b0 is the MSB); b0 b1 pick I, b2 b3 pick Q.
Complex point(std::uint8_t label);
// Hard decision by minimum Euclidean distance; ties go to the lower label.
std::uint8_t decide(Complex symbol);

}  // namespace qam16

struct QamFrame {
  SymbolFrame frame;
  std::size_t pad_len = 0;  // zero bits appended to reach a multiple of 4
};

QamFrame qam16_modulate(const BitStream& bits);
// Four bits per symbol, then the last pad_len bits are dropped.
BitStream qam16_demodulate(std::span<const Complex> symbols, std::size_t pad_len = 0);

struct BaselineResult {
  std::string received_text;
  LinkTrialReport report;
  std::size_t substitutions = 0;
};

/// Runs the whole digital chain through the shared channel model. Fading is
/// undone with the same ZF receiver as the semantic path.
BaselineResult baseline_pipeline(std::string_view text, const ChannelConfig& cfg);

}  // namespace vlfsim
