#include "vlfsim/kernels.hpp"

#include <cmath>

#include "vlfsim/rng.hpp"

namespace vlfsim::kernels::serial {

double sum_squares(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc;
}

double sum_norm(std::span<const Complex> x) {
  double acc = 0.0;
  for (const Complex& z : x) acc += std::norm(z);
  return acc;
}

void pack(std::span<const double> in, double scale, std::span<Complex> out) {
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = Complex(in[2 * k] * scale, in[2 * k + 1] * scale);
  }
}

void unpack(std::span<const Complex> in, double inv_scale, std::span<double> out) {
  for (std::size_t k = 0; k < in.size(); ++k) {
    out[2 * k] = in[k].real() * inv_scale;
    out[2 * k + 1] = in[k].imag() * inv_scale;
  }
}

void apply_channel(std::span<const Complex> tx, const ChannelDraw& draw,
                   std::span<Complex> gains, std::span<Complex> rx) {
  for (std::size_t i = 0; i < tx.size(); ++i) {
    const Complex h = draw.fading ? rng::complex_normal(draw.seed, kGainStream, i) : Complex(1.0, 0.0);
    Complex y = h * tx[i];
    if (draw.noise_std > 0.0) y += draw.noise_std * rng::complex_normal(draw.seed, kNoiseStream, i);
    gains[i] = h;
    rx[i] = y;
  }
}

std::size_t zf_equalize(std::span<const Complex> rx, std::span<const Complex> gains,
                        double erase_below, std::span<Complex> out) {
  std::size_t erased = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    if (std::abs(gains[i]) < erase_below) {
      out[i] = Complex(0.0, 0.0);
      ++erased;
    } else {
      out[i] = rx[i] / gains[i];
    }
  }
  return erased;
}

void gather_rotate(std::span<const double> in, std::span<const std::uint32_t> perm,
                   std::span<const double> cos, std::span<const double> sin,
                   std::span<double> out) {
  const std::size_t pairs = in.size() / 2;
  for (std::size_t j = 0; j < pairs; ++j) {
    const double a = in[perm[2 * j]];
    const double b = in[perm[2 * j + 1]];
    out[2 * j] = cos[j] * a - sin[j] * b;
    out[2 * j + 1] = sin[j] * a + cos[j] * b;
  }
  if (in.size() % 2 != 0) out[in.size() - 1] = in[perm[in.size() - 1]];
}

void rotate_scatter(std::span<const double> in, std::span<const std::uint32_t> perm,
                    std::span<const double> cos, std::span<const double> sin,
                    std::span<double> out) {
  const std::size_t pairs = in.size() / 2;
  for (std::size_t j = 0; j < pairs; ++j) {
    const double a = in[2 * j];
    const double b = in[2 * j + 1];
    out[perm[2 * j]] = cos[j] * a + sin[j] * b;
    out[perm[2 * j + 1]] = -sin[j] * a + cos[j] * b;
  }
  if (in.size() % 2 != 0) out[perm[in.size() - 1]] = in[in.size() - 1];
}

}  // namespace vlfsim::kernels::serial
