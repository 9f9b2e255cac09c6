#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace vlfsim {

using Complex = std::complex<double>;

inline constexpr std::size_t kDefaultQueries = 32;
inline constexpr std::size_t kDefaultFeatureDim = 768;
inline constexpr double kDefaultTargetPower = 1.0;

struct FeatureGeometry {
  std::size_t n_queries = kDefaultQueries;
  std::size_t dim = kDefaultFeatureDim;

  constexpr std::size_t elements() const noexcept { return n_queries * dim; }
  constexpr std::size_t symbols() const noexcept { return elements() / 2; }
  friend constexpr bool operator==(const FeatureGeometry&, const FeatureGeometry&) = default;
};

/// Vision-language feature matrix: n_queries rows of dim reals, row-major.
///
/// Construction enforces the frame invariants: positive geometry, an even
/// element count (symbols pair consecutive reals) and finite entries.
class FeatureFrame {
 public:
  FeatureFrame(std::size_t n_queries, std::size_t dim, std::vector<double> data);
  FeatureFrame(FeatureGeometry geometry, std::vector<double> data)
      : FeatureFrame(geometry.n_queries, geometry.dim, std::move(data)) {}

  std::size_t n_queries() const noexcept { return geometry_.n_queries; }
  std::size_t dim() const noexcept { return geometry_.dim; }
  FeatureGeometry geometry() const noexcept { return geometry_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<const double> data() const noexcept { return data_; }
  std::span<const double> row(std::size_t i) const noexcept {
    return std::span<const double>(data_).subspan(i * geometry_.dim, geometry_.dim);
  }
  double at(std::size_t row, std::size_t col) const { return data_.at(row * geometry_.dim + col); }

  friend bool operator==(const FeatureFrame&, const FeatureFrame&) = default;

 private:
  FeatureGeometry geometry_;
  std::vector<double> data_;
};

struct SymbolFrame {
  std::vector<Complex> symbols;
  double scale = 1.0;
  double target_power = kDefaultTargetPower;
};

// Side information the receiver needs to undo packing.
struct NormalizationRecord {
  double scale = 1.0;
  std::size_t n_queries = 0;
  std::size_t dim = 0;
};

struct PackedFrame {
  SymbolFrame symbols;
  NormalizationRecord record;
};

/// Maps the frame onto complex symbols: element 2k is the real part and
/// element 2k+1 the imaginary part of symbol k (row-major traversal). One
/// scalar scales the whole frame so that mean |symbol|^2 == target_power.
///
/// Throws DegenerateFrameError for an all-zero frame and ConfigError for a
/// non-positive target power.
PackedFrame pack_features(const FeatureFrame& frame, double target_power = kDefaultTargetPower);

/// Inverse of pack_features. Throws GeometryError when the record geometry
/// does not match the symbol count.
FeatureFrame unpack_features(const SymbolFrame& symbols, const NormalizationRecord& record);

}  // namespace vlfsim
