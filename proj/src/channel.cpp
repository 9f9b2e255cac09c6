#include "vlfsim/channel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "vlfsim/errors.hpp"
#include "vlfsim/kernels.hpp"

namespace vlfsim {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::ranges::transform(out, out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

std::string to_string(ChannelKind kind) {
  return kind == ChannelKind::Awgn ? "awgn" : "rayleigh";
}

std::string to_string(CsiMode mode) { return mode == CsiMode::Perfect ? "perfect" : "none"; }

ChannelKind parse_channel_kind(std::string_view text) {
  const std::string t = lower(text);
  if (t == "awgn") return ChannelKind::Awgn;
  if (t == "rayleigh" || t == "rayleighawgn" || t == "rayleigh_awgn") return ChannelKind::RayleighAwgn;
  throw ConfigError("unknown channel kind '" + std::string(text) + "'");
}

CsiMode parse_csi_mode(std::string_view text) {
  const std::string t = lower(text);
  if (t == "perfect" || t == "perfectcsi") return CsiMode::Perfect;
  if (t == "none" || t == "nocsi") return CsiMode::None;
  throw ConfigError("unknown CSI mode '" + std::string(text) + "'");
}

double noise_variance(double target_power, double snr_db) {
  return target_power * std::pow(10.0, -snr_db / 10.0);
}

ReceivedFrame transmit(const SymbolFrame& tx, const ChannelConfig& cfg) {
  if (tx.symbols.empty()) throw GeometryError("cannot transmit an empty symbol frame");
  if (!std::isfinite(cfg.snr_db)) throw ConfigError("snr_db must be finite");

  ReceivedFrame rx;
  rx.csi_available = cfg.csi == CsiMode::Perfect;
  rx.scale = tx.scale;
  rx.target_power = tx.target_power;
  rx.realization.noise_variance = cfg.noiseless ? 0.0 : noise_variance(tx.target_power, cfg.snr_db);
  rx.realization.gains.resize(tx.symbols.size());
  rx.symbols.resize(tx.symbols.size());

  const kernels::ChannelDraw draw{cfg.kind == ChannelKind::RayleighAwgn,
                                  std::sqrt(rx.realization.noise_variance), cfg.seed};
  kernels::parallel::apply_channel(tx.symbols, draw, rx.realization.gains, rx.symbols);
  return rx;
}

EqualizedFrame equalize_zf(const ReceivedFrame& rx) {
  if (!rx.csi_available) throw CsiUnavailableError("zero-forcing needs channel state information");
  if (rx.realization.gains.size() != rx.symbols.size()) {
    throw GeometryError("gain vector length does not match received symbols");
  }
  EqualizedFrame out;
  out.frame.scale = rx.scale;
  out.frame.target_power = rx.target_power;
  out.frame.symbols.resize(rx.symbols.size());
  out.erasures = kernels::parallel::zf_equalize(rx.symbols, rx.realization.gains,
                                                kDeepFadeThreshold, out.frame.symbols);
  return out;
}

EqualizedFrame recover(const ReceivedFrame& rx) {
  if (rx.csi_available) return equalize_zf(rx);
  return EqualizedFrame{SymbolFrame{rx.symbols, rx.scale, rx.target_power}, 0};
}

double calibrate_snr(const ChannelConfig& cfg, std::size_t n_symbols) {
  if (n_symbols < 10'000) throw ConfigError("calibration needs at least 10^4 pilots");
  const SymbolFrame pilots{std::vector<Complex>(n_symbols, Complex(1.0, 0.0)), 1.0, 1.0};
  const ReceivedFrame rx = transmit(pilots, cfg);

  std::vector<Complex> noise(n_symbols);
  for (std::size_t i = 0; i < n_symbols; ++i) {
    noise[i] = rx.symbols[i] - rx.realization.gains[i] * pilots.symbols[i];
  }
  const double gain_power = kernels::parallel::sum_norm(rx.realization.gains);
  const double noise_power = kernels::parallel::sum_norm(noise);
  if (noise_power == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(pilots.target_power * gain_power / noise_power);
}

}  // namespace vlfsim
