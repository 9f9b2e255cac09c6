#include "vlfsim/digital_baseline.hpp"

#include <cmath>
#include <limits>

#include "vlfsim/errors.hpp"

namespace vlfsim {

AsciiEncoding ascii_encode(std::string_view text) {
  AsciiEncoding out;
  out.stream.bits.reserve(text.size() * 7);
  for (char ch : text) {
    auto code = static_cast<unsigned char>(ch);
    if (code > 127) {
      code = '?';
      ++out.substitutions;
    }
    for (int b = 6; b >= 0; --b) out.stream.bits.push_back(static_cast<std::uint8_t>((code >> b) & 1U));
  }
  return out;
}

std::string ascii_decode(const BitStream& bits) {
  if (bits.pad_len > bits.bits.size() || bits.payload_size() % 7 != 0) {
    throw FramingError("ASCII payload of " + std::to_string(bits.bits.size()) + " bits (pad " +
                       std::to_string(bits.pad_len) + ") is not a multiple of 7");
  }
  std::string text;
  text.reserve(bits.payload_size() / 7);
  for (std::size_t i = 0; i < bits.payload_size(); i += 7) {
    unsigned code = 0;
    for (std::size_t b = 0; b < 7; ++b) code = (code << 1) | (bits.bits[i + b] & 1U);
    const bool control = code < 0x20 || code == 0x7f;
    text += (control && code != '\n' && code != '\t') ? '?' : static_cast<char>(code);
  }
  return text;
}

namespace hamming74 {

Codeword encode_block(const Word& data) {
  Codeword out{};
  for (std::size_t col = 0; col < 7; ++col) {
    std::uint8_t bit = 0;
    for (std::size_t row = 0; row < 4; ++row) bit ^= static_cast<std::uint8_t>(data[row] & kGenerator[row][col]);
    out[col] = bit;
  }
  return out;
}

std::uint8_t syndrome(const Codeword& received) {
  std::uint8_t s = 0;
  for (std::size_t row = 0; row < 3; ++row) {
    std::uint8_t bit = 0;
    for (std::size_t col = 0; col < 7; ++col) bit ^= static_cast<std::uint8_t>(received[col] & kParityCheck[row][col]);
    s = static_cast<std::uint8_t>((s << 1) | bit);
  }
  return s;
}

BlockDecode decode_block(const Codeword& received) {
  Codeword word = received;
  const std::uint8_t s = syndrome(word);
  if (s != 0) {
    for (std::size_t col = 0; col < 7; ++col) {
      const auto column = static_cast<std::uint8_t>((kParityCheck[0][col] << 2) | (kParityCheck[1][col] << 1) |
                                                    kParityCheck[2][col]);
      if (column == s) {
        word[col] ^= 1U;
        break;
      }
    }
  }
  return BlockDecode{Word{word[0], word[1], word[2], word[3]}, s};
}

}  // namespace hamming74

BitStream hamming74_encode(const BitStream& data) {
  BitStream out;
  out.pad_len = (4 - data.bits.size() % 4) % 4;
  const std::size_t blocks = (data.bits.size() + out.pad_len) / 4;
  out.bits.reserve(blocks * 7);
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    hamming74::Word word{};
    for (std::size_t j = 0; j < 4; ++j) {
      const std::size_t i = blk * 4 + j;
      word[j] = i < data.bits.size() ? static_cast<std::uint8_t>(data.bits[i] & 1U) : 0;
    }
    const auto cw = hamming74::encode_block(word);
    out.bits.insert(out.bits.end(), cw.begin(), cw.end());
  }
  return out;
}

BitStream hamming74_decode(const BitStream& coded) {
  if (coded.bits.size() % 7 != 0) {
    throw FramingError("coded stream of " + std::to_string(coded.bits.size()) + " bits is not a multiple of 7");
  }
  const std::size_t blocks = coded.bits.size() / 7;
  if (coded.pad_len >= 4 || coded.pad_len > blocks * 4) throw FramingError("invalid Hamming pad length");
  BitStream out;
  out.bits.reserve(blocks * 4);
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    hamming74::Codeword cw{};
    for (std::size_t j = 0; j < 7; ++j) cw[j] = static_cast<std::uint8_t>(coded.bits[blk * 7 + j] & 1U);
    const auto dec = hamming74::decode_block(cw);
    out.bits.insert(out.bits.end(), dec.data.begin(), dec.data.end());
  }
  out.bits.resize(out.bits.size() - coded.pad_len);
  return out;
}

namespace qam16 {

double scale() noexcept { return 1.0 / std::sqrt(10.0); }

Complex point(std::uint8_t label) {
  const double k = scale();
  return {kLevelForPair[(label >> 2) & 3U] * k, kLevelForPair[label & 3U] * k};
}

namespace {

unsigned decide_axis(double x) {
  const double k = scale();
  unsigned best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (unsigned pair = 0; pair < 4; ++pair) {
    const double d = std::abs(x - kLevelForPair[pair] * k);
    if (d < best_d) {
      best_d = d;
      best = pair;
    }
  }
  return best;
}

}  // namespace

std::uint8_t decide(Complex symbol) {
  return static_cast<std::uint8_t>((decide_axis(symbol.real()) << 2) | decide_axis(symbol.imag()));
}

}  // namespace qam16

QamFrame qam16_modulate(const BitStream& bits) {
  QamFrame out;
  out.pad_len = (4 - bits.bits.size() % 4) % 4;
  const std::size_t n = (bits.bits.size() + out.pad_len) / 4;
  out.frame.symbols.resize(n);
  out.frame.scale = qam16::scale();
  out.frame.target_power = 1.0;
  for (std::size_t s = 0; s < n; ++s) {
    std::uint8_t label = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      const std::size_t i = 4 * s + j;
      const std::uint8_t b = i < bits.bits.size() ? (bits.bits[i] & 1U) : 0;
      label = static_cast<std::uint8_t>((label << 1) | b);
    }
    out.frame.symbols[s] = qam16::point(label);
  }
  return out;
}

BitStream qam16_demodulate(std::span<const Complex> symbols, std::size_t pad_len) {
  if (pad_len >= 4 || pad_len > 4 * symbols.size()) throw FramingError("invalid QAM pad length");
  BitStream out;
  out.bits.resize(4 * symbols.size());
  for (std::size_t s = 0; s < symbols.size(); ++s) {
    const std::uint8_t label = qam16::decide(symbols[s]);
    for (std::size_t j = 0; j < 4; ++j) out.bits[4 * s + j] = (label >> (3 - j)) & 1U;
  }
  out.bits.resize(out.bits.size() - pad_len);
  return out;
}

BaselineResult baseline_pipeline(std::string_view text, const ChannelConfig& cfg) {
  BaselineResult result;
  result.report.pipeline = "baseline";
  result.report.snr_db = cfg.snr_db;
  result.report.seed = cfg.seed;

  const AsciiEncoding source = ascii_encode(text);
  result.substitutions = source.substitutions;
  const BitStream coded = hamming74_encode(source.stream);

  std::string sent_text = ascii_decode(source.stream);
  if (coded.bits.empty()) {
    result.report.ber_pre_fec = 0.0;
    result.report.ber_post_fec = 0.0;
    result.report.cer = 0.0;
    result.report.bleu = 0.0;
    return result;
  }

  const QamFrame tx = qam16_modulate(coded);
  const ReceivedFrame rx = transmit(tx.frame, cfg);
  const EqualizedFrame eq = recover(rx);
  result.report.erasures = eq.erasures;

  BitStream rx_coded = qam16_demodulate(eq.frame.symbols, tx.pad_len);
  rx_coded.pad_len = coded.pad_len;
  const BitStream rx_data = hamming74_decode(rx_coded);
  result.received_text = ascii_decode(rx_data);

  result.report.ber_pre_fec = ber(coded.bits, rx_coded.bits);
  result.report.ber_post_fec = ber(source.stream.bits, rx_data.bits);
  result.report.cer = character_error_rate(sent_text, result.received_text);
  result.report.bleu = bleu(result.received_text, sent_text);
  return result;
}

}  // namespace vlfsim
