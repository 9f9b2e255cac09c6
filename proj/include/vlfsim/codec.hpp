#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vlfsim/feature_frame.hpp"
#include "vlfsim/image.hpp"

namespace vlfsim {

struct DecodedText {
  std::string text;
  std::optional<double> confidence;
};

/// Encoder / text decoder / image decoder roles around the transmitted
/// feature. Decoders must accept any finite frame of the configured geometry,
/// however noisy.
class SemanticCodec {
 public:
  virtual ~SemanticCodec() = default;

  virtual FeatureGeometry feature_geometry() const = 0;
  virtual FeatureFrame encode(const Image& image) const = 0;
  virtual DecodedText decode_text(const FeatureFrame& frame) const = 0;
  virtual Image decode_image(const FeatureFrame& frame) const = 0;

  // False when calls must not overlap (e.g. a single bridge connection).
  virtual bool concurrent() const { return true; }
};

enum class Exec { Parallel, Serial };

/// The first `rows` rows of a seeded orthogonal operator on R^cols, kept in
/// factored form: rounds of (permutation, pairwise Givens rotation). Rows are
/// orthonormal, so P * P^T = I and P^T * P is an orthogonal projector.
class OrthoProjection {
 public:
  // rounds == 0 picks ceil(log2(cols)) + 2. GeometryError if rows > cols.
  OrthoProjection(std::size_t rows, std::size_t cols, std::uint64_t seed, std::size_t rounds = 0);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t rounds() const noexcept { return rounds_.size(); }

  std::vector<double> apply(std::span<const double> x, Exec exec = Exec::Parallel) const;
  std::vector<double> apply_transpose(std::span<const double> y, Exec exec = Exec::Parallel) const;

 private:
  struct Round {
    std::vector<std::uint32_t> perm;
    std::vector<double> cos;
    std::vector<double> sin;
  };

  std::size_t rows_;
  std::size_t cols_;
  std::vector<Round> rounds_;
};

/// Label prototypes in the pooled text-embedding space: a frame is averaged
/// over its query rows, mapped d -> k by a seeded matrix, and compared by
/// cosine against unit-norm prototype keys.
class LabelBank {
 public:
  LabelBank(FeatureGeometry geometry, std::size_t text_dim, std::uint64_t seed);

  // DegenerateFrameError if the prototype pools to zero.
  void add(std::string label, const FeatureFrame& prototype);

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  std::span<const double> key(std::size_t i) const;
  std::size_t text_dim() const noexcept { return text_dim_; }
  FeatureGeometry geometry() const noexcept { return geometry_; }

  std::vector<double> pool(const FeatureFrame& frame) const;
  std::vector<double> embed(const FeatureFrame& frame) const;

  // ConfigError on an empty bank. A zero embedding returns the first label
  // with confidence 0.
  DecodedText nearest(const FeatureFrame& frame) const;

 private:
  FeatureGeometry geometry_;
  std::size_t text_dim_;
  std::vector<double> projection_;  // text_dim x dim, row-major
  std::vector<std::string> labels_;
  std::vector<double> keys_;  // size() x text_dim
};

struct ToyCodecOptions {
  FeatureGeometry features{};
  ImageGeometry image{3, 128, 128};
  std::uint64_t seed = 7;
  std::size_t text_dim = 64;
};

/// Desk-scale stand-in for an image encoder plus text/image decoders:
/// encode is a seeded orthonormal projection of the flattened image,
/// decode_image its transpose, decode_text a nearest-prototype lookup.
class ToyProjectionCodec final : public SemanticCodec {
 public:
  // A null bank creates a private one from options.seed and options.text_dim.
  explicit ToyProjectionCodec(const ToyCodecOptions& options, std::shared_ptr<LabelBank> bank = nullptr);

  FeatureGeometry feature_geometry() const override { return options_.features; }
  ImageGeometry image_geometry() const noexcept { return options_.image; }

  FeatureFrame encode(const Image& image) const override;
  DecodedText decode_text(const FeatureFrame& frame) const override;
  Image decode_image(const FeatureFrame& frame) const override;

  LabelBank& bank() noexcept { return *bank_; }
  const LabelBank& bank() const noexcept { return *bank_; }
  std::shared_ptr<LabelBank> shared_bank() const noexcept { return bank_; }
  const OrthoProjection& projection() const noexcept { return projection_; }

 private:
  ToyCodecOptions options_;
  OrthoProjection projection_;
  std::shared_ptr<LabelBank> bank_;
};

}  // namespace vlfsim
