#include "vlfsim/codec.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>

#include "vlfsim/errors.hpp"
#include "vlfsim/kernels.hpp"
#include "vlfsim/rng.hpp"

namespace vlfsim {

namespace {

constexpr std::uint64_t kPermStream = 0x5045524dULL;
constexpr std::uint64_t kAngleStream = 0x414e474cULL;
constexpr std::uint64_t kTextStream = 0x54455854ULL;

std::uint64_t projection_seed(std::uint64_t seed, const ImageGeometry& g) {
  std::uint64_t s = rng::combine(seed, g.channels);
  s = rng::combine(s, g.height);
  return rng::combine(s, g.width);
}

}  // namespace

OrthoProjection::OrthoProjection(std::size_t rows, std::size_t cols, std::uint64_t seed, std::size_t rounds)
    : rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0) throw GeometryError("projection needs positive dimensions");
  if (rows > cols) {
    throw GeometryError("cannot build " + std::to_string(rows) + " orthonormal rows in R^" + std::to_string(cols));
  }
  if (cols > std::numeric_limits<std::uint32_t>::max()) throw GeometryError("projection input too large");
  if (rounds == 0) rounds = static_cast<std::size_t>(std::bit_width(cols - 1)) + 2;

  const std::size_t pairs = cols / 2;
  rounds_.resize(rounds);
  for (std::size_t r = 0; r < rounds; ++r) {
    Round& round = rounds_[r];
    round.perm.resize(cols);
    std::iota(round.perm.begin(), round.perm.end(), 0U);
    for (std::size_t i = cols - 1; i > 0; --i) {
      const std::size_t j = rng::draw(seed, kPermStream + r, i) % (i + 1);
      std::swap(round.perm[i], round.perm[j]);
    }
    round.cos.resize(pairs);
    round.sin.resize(pairs);
    for (std::size_t j = 0; j < pairs; ++j) {
      const double theta = 2.0 * std::numbers::pi * rng::uniform_open(rng::draw(seed, kAngleStream + r, j));
      round.cos[j] = std::cos(theta);
      round.sin[j] = std::sin(theta);
    }
  }
}

std::vector<double> OrthoProjection::apply(std::span<const double> x, Exec exec) const {
  if (x.size() != cols_) throw GeometryError("projection input has wrong length");
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> b(cols_);
  for (const Round& round : rounds_) {
    if (exec == Exec::Parallel) {
      kernels::parallel::gather_rotate(a, round.perm, round.cos, round.sin, b);
    } else {
      kernels::serial::gather_rotate(a, round.perm, round.cos, round.sin, b);
    }
    a.swap(b);
  }
  a.resize(rows_);
  return a;
}

std::vector<double> OrthoProjection::apply_transpose(std::span<const double> y, Exec exec) const {
  if (y.size() != rows_) throw GeometryError("projection output has wrong length");
  std::vector<double> a(cols_, 0.0);
  std::copy(y.begin(), y.end(), a.begin());
  std::vector<double> b(cols_);
  for (auto it = rounds_.rbegin(); it != rounds_.rend(); ++it) {
    if (exec == Exec::Parallel) {
      kernels::parallel::rotate_scatter(a, it->perm, it->cos, it->sin, b);
    } else {
      kernels::serial::rotate_scatter(a, it->perm, it->cos, it->sin, b);
    }
    a.swap(b);
  }
  return a;
}

LabelBank::LabelBank(FeatureGeometry geometry, std::size_t text_dim, std::uint64_t seed)
    : geometry_(geometry), text_dim_(text_dim) {
  if (geometry.elements() == 0) throw GeometryError("label bank needs a positive feature geometry");
  if (text_dim == 0) throw ConfigError("text embedding width must be positive");
  projection_.resize(text_dim * geometry.dim);
  const double norm = 1.0 / std::sqrt(static_cast<double>(geometry.dim));
  for (std::size_t i = 0; i < projection_.size(); ++i) {
    projection_[i] = norm * rng::real_normal(seed, kTextStream, i);
  }
}

std::vector<double> LabelBank::pool(const FeatureFrame& frame) const {
  if (frame.geometry() != geometry_) throw GeometryError("frame geometry does not match the label bank");
  std::vector<double> pooled(geometry_.dim, 0.0);
  for (std::size_t r = 0; r < geometry_.n_queries; ++r) {
    const auto row = frame.row(r);
    for (std::size_t c = 0; c < geometry_.dim; ++c) pooled[c] += row[c];
  }
  const double inv = 1.0 / static_cast<double>(geometry_.n_queries);
  for (double& v : pooled) v *= inv;
  return pooled;
}

std::vector<double> LabelBank::embed(const FeatureFrame& frame) const {
  const std::vector<double> pooled = pool(frame);
  std::vector<double> out(text_dim_, 0.0);
  for (std::size_t k = 0; k < text_dim_; ++k) {
    const double* w = projection_.data() + k * geometry_.dim;
    double acc = 0.0;
    for (std::size_t c = 0; c < geometry_.dim; ++c) acc += w[c] * pooled[c];
    out[k] = acc;
  }
  return out;
}

void LabelBank::add(std::string label, const FeatureFrame& prototype) {
  std::vector<double> key = embed(prototype);
  const double norm = std::sqrt(std::inner_product(key.begin(), key.end(), key.begin(), 0.0));
  if (norm == 0.0) throw DegenerateFrameError("label prototype '" + label + "' pools to zero");
  for (double& v : key) v /= norm;
  labels_.push_back(std::move(label));
  keys_.insert(keys_.end(), key.begin(), key.end());
}

std::span<const double> LabelBank::key(std::size_t i) const {
  if (i >= labels_.size()) throw std::out_of_range("label index");
  return std::span<const double>(keys_).subspan(i * text_dim_, text_dim_);
}

DecodedText LabelBank::nearest(const FeatureFrame& frame) const {
  if (labels_.empty()) throw ConfigError("label bank is empty");
  const std::vector<double> e = embed(frame);
  const double norm = std::sqrt(std::inner_product(e.begin(), e.end(), e.begin(), 0.0));
  if (norm == 0.0) return DecodedText{labels_.front(), 0.0};

  std::size_t best = 0;
  double best_cos = -2.0;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const auto k = key(i);
    const double c = std::inner_product(e.begin(), e.end(), k.begin(), 0.0) / norm;
    if (c > best_cos) {
      best_cos = c;
      best = i;
    }
  }
  return DecodedText{labels_[best], std::clamp(best_cos, -1.0, 1.0)};
}

ToyProjectionCodec::ToyProjectionCodec(const ToyCodecOptions& options, std::shared_ptr<LabelBank> bank)
    : options_(options),
      projection_(options.features.elements(), options.image.values(),
                  projection_seed(options.seed, options.image)),
      bank_(bank ? std::move(bank)
                 : std::make_shared<LabelBank>(options.features, options.text_dim, options.seed)) {
  if (options.features.elements() % 2 != 0) throw GeometryError("feature element count must be even");
  if (bank_->geometry() != options.features) throw GeometryError("label bank geometry does not match codec");
}

FeatureFrame ToyProjectionCodec::encode(const Image& image) const {
  if (image.geometry != options_.image || image.values.size() != options_.image.values()) {
    throw GeometryError("image geometry does not match the configured projection");
  }
  for (double v : image.values) {
    if (!std::isfinite(v)) throw DataError("image contains a non-finite value");
  }
  return FeatureFrame(options_.features, projection_.apply(image.values));
}

DecodedText ToyProjectionCodec::decode_text(const FeatureFrame& frame) const {
  return bank_->nearest(frame);
}

Image ToyProjectionCodec::decode_image(const FeatureFrame& frame) const {
  if (frame.geometry() != options_.features) throw GeometryError("frame geometry does not match the codec");
  return Image{options_.image, projection_.apply_transpose(frame.data())};
}

}  // namespace vlfsim
