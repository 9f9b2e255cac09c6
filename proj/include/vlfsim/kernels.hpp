#pragma once

// Per-element hot loops. `serial` is the plain reference implementation kept
// for testing; `parallel` is the OpenMP version used by the library. Both
// produce bit-identical results for every kernel except the reductions,
// which sum in fixed-size blocks in the parallel path so that the result
// does not depend on the thread count.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>

namespace vlfsim::kernels {

using Complex = std::complex<double>;

// Fixed reduction block; keeps parallel sums independent of the team size.
inline constexpr std::size_t kReduceBlock = 4096;

// Draw streams for the channel realization.
inline constexpr std::uint64_t kGainStream = 0x4741494eULL;
inline constexpr std::uint64_t kNoiseStream = 0x4e4f4953ULL;

struct ChannelDraw {
  bool fading = false;
  double noise_std = 0.0;  // sqrt(sigma^2); total over both quadratures
  std::uint64_t seed = 0;
};

namespace serial {

double sum_squares(std::span<const double> x);
double sum_norm(std::span<const Complex> x);
void pack(std::span<const double> in, double scale, std::span<Complex> out);
void unpack(std::span<const Complex> in, double inv_scale, std::span<double> out);
void apply_channel(std::span<const Complex> tx, const ChannelDraw& draw,
                   std::span<Complex> gains, std::span<Complex> rx);
std::size_t zf_equalize(std::span<const Complex> rx, std::span<const Complex> gains,
                        double erase_below, std::span<Complex> out);
void gather_rotate(std::span<const double> in, std::span<const std::uint32_t> perm,
                   std::span<const double> cos, std::span<const double> sin,
                   std::span<double> out);
void rotate_scatter(std::span<const double> in, std::span<const std::uint32_t> perm,
                    std::span<const double> cos, std::span<const double> sin,
                    std::span<double> out);

}  // namespace serial

namespace parallel {

double sum_squares(std::span<const double> x);
double sum_norm(std::span<const Complex> x);
void pack(std::span<const double> in, double scale, std::span<Complex> out);
void unpack(std::span<const Complex> in, double inv_scale, std::span<double> out);
void apply_channel(std::span<const Complex> tx, const ChannelDraw& draw,
                   std::span<Complex> gains, std::span<Complex> rx);
std::size_t zf_equalize(std::span<const Complex> rx, std::span<const Complex> gains,
                        double erase_below, std::span<Complex> out);
void gather_rotate(std::span<const double> in, std::span<const std::uint32_t> perm,
                   std::span<const double> cos, std::span<const double> sin,
                   std::span<double> out);
void rotate_scatter(std::span<const double> in, std::span<const std::uint32_t> perm,
                    std::span<const double> cos, std::span<const double> sin,
                    std::span<double> out);

}  // namespace parallel

}  // namespace vlfsim::kernels
