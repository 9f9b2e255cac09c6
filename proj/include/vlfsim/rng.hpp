#pragma once

// Counter-based random draws. Every value is a pure function of
// (seed, stream, index), so kernels can evaluate draws in any order or on any
// thread and still reproduce the same realization bit-for-bit.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace vlfsim::rng {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t combine(std::uint64_t seed, std::uint64_t value) noexcept {
  return splitmix64(seed ^ splitmix64(value + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t draw(std::uint64_t seed, std::uint64_t stream,
                             std::uint64_t index) noexcept {
  return splitmix64(combine(seed, stream) ^ splitmix64(index));
}

// FNV-1a, used to turn input identifiers into seed material.
constexpr std::uint64_t hash_string(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Uniform on the open interval (0, 1).
inline double uniform_open(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Circularly-symmetric complex Gaussian with E|z|^2 = 1 (variance 1/2 per part).
inline std::complex<double> complex_normal(std::uint64_t seed, std::uint64_t stream,
                                           std::uint64_t index) noexcept {
  const double u1 = uniform_open(draw(seed, stream, 2 * index));
  const double u2 = uniform_open(draw(seed, stream, 2 * index + 1));
  const double r = std::sqrt(-std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

// Real standard normal.
inline double real_normal(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t index) noexcept {
  return std::numbers::sqrt2 * complex_normal(seed, stream, index).real();
}

}  // namespace vlfsim::rng
