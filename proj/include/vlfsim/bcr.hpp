#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>

namespace vlfsim {

struct ImageGeometry {
  std::size_t channels = 3;
  std::size_t height = 0;
  std::size_t width = 0;

  constexpr std::size_t pixels() const noexcept { return height * width; }
  constexpr std::size_t values() const noexcept { return channels * height * width; }
  friend constexpr bool operator==(const ImageGeometry&, const ImageGeometry&) = default;
  friend constexpr auto operator<=>(const ImageGeometry&, const ImageGeometry&) = default;
};

// Reduced non-negative fraction.
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  static Rational reduced(std::uint64_t num, std::uint64_t den);
  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
    // Cross-multiplied in 128 bits so large geometries cannot overflow.
    const auto lhs = static_cast<unsigned __int128>(a.num) * b.den;
    const auto rhs = static_cast<unsigned __int128>(b.num) * a.den;
    return lhs <=> rhs;
  }
};

/// Complex channel uses for an N x d feature: N*d/2. GeometryError if N*d is odd.
std::uint64_t channel_uses(std::size_t n_queries, std::size_t dim);

/// Channel uses per source value: N*d / (2*C*h*w), exact.
Rational compute_bcr(std::size_t n_queries, std::size_t dim, const ImageGeometry& image);

}  // namespace vlfsim
