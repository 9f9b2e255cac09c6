#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vlfsim/feature_frame.hpp"

namespace vlfsim {

enum class ChannelKind { Awgn, RayleighAwgn };
enum class CsiMode { Perfect, None };

std::string to_string(ChannelKind kind);
std::string to_string(CsiMode mode);
// Accepts "awgn" and "rayleigh" (case-insensitive); ConfigError otherwise.
ChannelKind parse_channel_kind(std::string_view text);
// Accepts "perfect" and "none".
CsiMode parse_csi_mode(std::string_view text);

struct ChannelConfig {
  ChannelKind kind = ChannelKind::Awgn;
  double snr_db = 10.0;
  CsiMode csi = CsiMode::Perfect;
  std::uint64_t seed = 0;
  // Skip the noise draw entirely (sigma^2 = 0); fading still applies.
  bool noiseless = false;
};

struct ChannelRealization {
  std::vector<Complex> gains;  // all ones for AWGN
  double noise_variance = 0.0;  // per complex symbol, both quadratures
};

struct ReceivedFrame {
  std::vector<Complex> symbols;
  ChannelRealization realization;
  bool csi_available = true;
  // Carried over from the transmitted frame so the receiver can rebuild it.
  double scale = 1.0;
  double target_power = kDefaultTargetPower;
};

struct EqualizedFrame {
  SymbolFrame frame;
  std::size_t erasures = 0;
};

// Gains with magnitude below this are treated as erased symbols.
inline constexpr double kDeepFadeThreshold = 1e-12;

/// sigma^2 = P * 10^(-snr_db / 10).
double noise_variance(double target_power, double snr_db);

/// y~_i = h_i * y_i + n_i with n_i ~ CN(0, sigma^2). Deterministic in
/// (cfg.seed, symbol index). Throws GeometryError on an empty frame.
ReceivedFrame transmit(const SymbolFrame& tx, const ChannelConfig& cfg);

/// Zero-forcing: y~_i / h_i. Deep fades are zeroed and counted.
/// Throws CsiUnavailableError when the receiver has no CSI.
EqualizedFrame equalize_zf(const ReceivedFrame& rx);

// ZF under perfect CSI; raw pass-through without CSI.
EqualizedFrame recover(const ReceivedFrame& rx);

/// Sends n_symbols unit-power pilots and returns the measured SNR in dB,
/// 10*log10(P * mean|h|^2 / mean|n|^2). Requires n_symbols >= 10^4.
double calibrate_snr(const ChannelConfig& cfg, std::size_t n_symbols);

}  // namespace vlfsim
