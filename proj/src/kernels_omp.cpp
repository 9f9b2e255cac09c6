#include "vlfsim/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <omp.h>

#include "vlfsim/rng.hpp"

namespace vlfsim::kernels::parallel {

namespace {

// Below this many elements the team start-up costs more than the loop.
constexpr std::ptrdiff_t kParallelMin = 8192;

template <typename T, typename F>
double blocked_sum(std::span<const T> x, F term) {
  const std::size_t blocks = (x.size() + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partial(blocks, 0.0);
  const auto nb = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static) if (static_cast<std::ptrdiff_t>(x.size()) > kParallelMin)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
    const std::size_t hi = std::min(x.size(), lo + kReduceBlock);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += term(x[i]);
    partial[static_cast<std::size_t>(b)] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace

double sum_squares(std::span<const double> x) {
  return blocked_sum(x, [](double v) { return v * v; });
}

double sum_norm(std::span<const Complex> x) {
  return blocked_sum(x, [](const Complex& z) { return std::norm(z); });
}

void pack(std::span<const double> in, double scale, std::span<Complex> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for simd schedule(static) if (n > kParallelMin)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    out[k] = Complex(in[2 * k] * scale, in[2 * k + 1] * scale);
  }
}

void unpack(std::span<const Complex> in, double inv_scale, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(in.size());
#pragma omp parallel for simd schedule(static) if (n > kParallelMin)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    out[2 * k] = in[k].real() * inv_scale;
    out[2 * k + 1] = in[k].imag() * inv_scale;
  }
}

void apply_channel(std::span<const Complex> tx, const ChannelDraw& draw,
                   std::span<Complex> gains, std::span<Complex> rx) {
  const auto n = static_cast<std::ptrdiff_t>(tx.size());
#pragma omp parallel for schedule(static) if (n > kParallelMin / 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::uint64_t>(i);
    const Complex h = draw.fading ? rng::complex_normal(draw.seed, kGainStream, idx) : Complex(1.0, 0.0);
    Complex y = h * tx[i];
    if (draw.noise_std > 0.0) y += draw.noise_std * rng::complex_normal(draw.seed, kNoiseStream, idx);
    gains[i] = h;
    rx[i] = y;
  }
}

std::size_t zf_equalize(std::span<const Complex> rx, std::span<const Complex> gains,
                        double erase_below, std::span<Complex> out) {
  const auto n = static_cast<std::ptrdiff_t>(rx.size());
  std::size_t erased = 0;
#pragma omp parallel for schedule(static) reduction(+ : erased) if (n > kParallelMin)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
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
  const auto pairs = static_cast<std::ptrdiff_t>(in.size() / 2);
#pragma omp parallel for schedule(static) if (pairs > kParallelMin)
  for (std::ptrdiff_t j = 0; j < pairs; ++j) {
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
  const auto pairs = static_cast<std::ptrdiff_t>(in.size() / 2);
  // perm is a bijection, so the scattered writes never collide.
#pragma omp parallel for schedule(static) if (pairs > kParallelMin)
  for (std::ptrdiff_t j = 0; j < pairs; ++j) {
    const double a = in[2 * j];
    const double b = in[2 * j + 1];
    out[perm[2 * j]] = cos[j] * a + sin[j] * b;
    out[perm[2 * j + 1]] = -sin[j] * a + cos[j] * b;
  }
  if (in.size() % 2 != 0) out[perm[in.size() - 1]] = in[in.size() - 1];
}

}  // namespace vlfsim::kernels::parallel
