#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "vlfsim/channel.hpp"
#include "vlfsim/codec.hpp"
#include "vlfsim/errors.hpp"
#include "vlfsim/feature_frame.hpp"
#include "vlfsim/harness.hpp"
#include "vlfsim/metrics.hpp"
#include "vlfsim/rng.hpp"

using namespace vlfsim;

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

std::vector<double> gaussian(std::size_t n, std::uint64_t seed, double sd = 1.0) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = sd * rng::real_normal(seed, 0, i);
  return v;
}

Image random_image(const ImageGeometry& g, std::uint64_t seed) {
  Image img{g, std::vector<double>(g.values())};
  for (std::size_t i = 0; i < img.values.size(); ++i) img.values[i] = rng::uniform_open(rng::draw(seed, 0, i));
  return img;
}

FeatureFrame through_channel(const FeatureFrame& f, const ChannelConfig& cfg) {
  const PackedFrame p = pack_features(f);
  return unpack_features(recover(transmit(p.symbols, cfg)).frame, p.record);
}

}  // namespace

TEST_CASE("projection rows are orthonormal") {
  const OrthoProjection p(6, 10, 5);
  std::vector<std::vector<double>> dense(10);
  for (std::size_t i = 0; i < 10; ++i) {
    std::vector<double> e(10, 0.0);
    e[i] = 1.0;
    dense[i] = p.apply(e);
    CHECK(dense[i] == p.apply(e, Exec::Serial));
  }
  // (P P^T)_{jk} = sum_i P_{ji} P_{ki}
  for (std::size_t j = 0; j < 6; ++j) {
    for (std::size_t k = 0; k < 6; ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < 10; ++i) acc += dense[i][j] * dense[i][k];
      CHECK(acc == doctest::Approx(j == k ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
    }
  }
  // apply_transpose is the adjoint.
  const auto x = gaussian(10, 1);
  const auto y = gaussian(6, 2);
  CHECK(dot(p.apply(x), y) == doctest::Approx(dot(x, p.apply_transpose(y))).epsilon(1e-12));
  CHECK(p.apply_transpose(y) == p.apply_transpose(y, Exec::Serial));
  CHECK(p.rounds() == 6);  // ceil(log2 10) + 2
  CHECK_THROWS_AS(OrthoProjection(11, 10, 1), GeometryError);
}

TEST_CASE("property: projection never increases the norm") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t cols = 2 + rng::draw(seed, 9, 0) % 500;
    const std::size_t rows = 1 + rng::draw(seed, 9, 1) % cols;
    const OrthoProjection p(rows, cols, seed);
    const auto x = gaussian(cols, seed + 100);
    const auto px = p.apply(x);
    CHECK(px.size() == rows);
    CHECK(dot(px, px) <= dot(x, x) * (1.0 + 1e-12));
    if (rows == cols) CHECK(dot(px, px) == doctest::Approx(dot(x, x)).epsilon(1e-12));
  }
}

TEST_CASE("toy codec reconstruction") {
  ToyCodecOptions opt;
  opt.features = {4, 16};
  opt.image = {3, 8, 8};
  const ToyProjectionCodec codec(opt);

  SUBCASE("row-space images reconstruct exactly") {
    const auto y = gaussian(64, 4);
    const Image img{opt.image, codec.projection().apply_transpose(y)};
    const Image back = codec.decode_image(codec.encode(img));
    for (std::size_t i = 0; i < img.values.size(); ++i) CHECK(back.values[i] == doctest::Approx(img.values[i]).epsilon(1e-12).scale(1.0));
  }

  SUBCASE("noiseless MSE is the energy outside the row space") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Image img = random_image(opt.image, seed);
      const FeatureFrame f = codec.encode(img);
      const double expected = (dot(img.values, img.values) - dot(f.data(), f.data())) / img.values.size();
      CHECK(image_mse(img, codec.decode_image(f)) == doctest::Approx(expected).epsilon(1e-10).scale(1.0));
    }
  }

  SUBCASE("geometry checks") {
    CHECK_THROWS_AS(codec.encode(random_image({3, 8, 4}, 1)), GeometryError);
    CHECK_THROWS_AS(codec.decode_image(FeatureFrame(2, 16, gaussian(32, 1))), GeometryError);
  }
}

TEST_CASE("reconstruction improves with SNR on paired trials") {
  const ToyCodecOptions opt;  // 32 x 768 features, 3 x 128 x 128 images
  const ToyProjectionCodec codec(opt);
  const Image img = random_image(opt.image, 12);
  const FeatureFrame f = codec.encode(img);
  int better = 0;
  constexpr int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t seed = 7000 + t;
    const double hi = image_mse(img, codec.decode_image(through_channel(f, {ChannelKind::Awgn, 10.0, CsiMode::Perfect, seed})));
    const double lo = image_mse(img, codec.decode_image(through_channel(f, {ChannelKind::Awgn, 0.0, CsiMode::Perfect, seed})));
    better += hi < lo;
  }
  CHECK(better >= 190);
}

TEST_CASE("nearest-prototype text decoding") {
  const FeatureGeometry g{32, 768};
  auto bank = std::make_shared<LabelBank>(g, 64, 3);
  std::vector<FeatureFrame> protos;
  for (int i = 0; i < 16; ++i) {
    protos.emplace_back(g, gaussian(g.elements(), 50 + i));
    bank->add("label " + std::to_string(i), protos.back());
  }

  SUBCASE("a prototype decodes to itself with full confidence") {
    for (int i = 0; i < 16; ++i) {
      const DecodedText d = bank->nearest(protos[i]);
      CHECK(d.text == "label " + std::to_string(i));
      CHECK(*d.confidence == doctest::Approx(1.0));
    }
  }

  SUBCASE("keys are unit norm and nearly orthogonal") {
    for (std::size_t i = 0; i < bank->size(); ++i) {
      CHECK(dot(bank->key(i), bank->key(i)) == doctest::Approx(1.0));
      for (std::size_t j = i + 1; j < bank->size(); ++j) CHECK(std::abs(dot(bank->key(i), bank->key(j))) < 0.6);
    }
  }

  SUBCASE("accuracy at 10 dB and monotone in SNR") {
    const std::vector<double> snrs = default_snr_list();
    std::vector<double> accuracy;
    for (double snr : snrs) {
      int correct = 0;
      constexpr int trials = 500;
      for (int t = 0; t < trials; ++t) {
        const int label = t % 16;
        const FeatureFrame rx = through_channel(protos[label], {ChannelKind::Awgn, snr, CsiMode::Perfect, 900u + t});
        correct += bank->nearest(rx).text == "label " + std::to_string(label);
      }
      accuracy.push_back(static_cast<double>(correct) / trials);
    }
    CHECK(accuracy.back() >= 0.95);
    for (std::size_t i = 1; i < accuracy.size(); ++i) {
      CAPTURE(i);
      CHECK(accuracy[i] >= accuracy[i - 1]);
    }
  }

  SUBCASE("pooling is linear and decoding is scale invariant") {
    std::vector<double> sum(g.elements());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = protos[0].data()[i] + 2.0 * protos[1].data()[i];
    const auto pa = bank->pool(protos[0]);
    const auto pb = bank->pool(protos[1]);
    const auto ps = bank->pool(FeatureFrame(g, sum));
    for (std::size_t c = 0; c < g.dim; ++c) CHECK(ps[c] == doctest::Approx(pa[c] + 2.0 * pb[c]).epsilon(1e-12).scale(1.0));

    const FeatureFrame noisy = through_channel(protos[3], {ChannelKind::Awgn, -5.0, CsiMode::Perfect, 1});
    std::vector<double> scaled(noisy.data().begin(), noisy.data().end());
    for (double& v : scaled) v *= 37.5;
    const auto a = bank->nearest(noisy);
    const auto b = bank->nearest(FeatureFrame(g, scaled));
    CHECK(a.text == b.text);
    CHECK(*a.confidence == doctest::Approx(*b.confidence).epsilon(1e-12));
  }

  SUBCASE("empty bank and zero frames") {
    LabelBank empty(g, 8, 1);
    CHECK_THROWS_AS(empty.nearest(protos[0]), ConfigError);
    CHECK_THROWS_AS(empty.add("zero", FeatureFrame(g, std::vector<double>(g.elements(), 0.0))), DegenerateFrameError);
    const auto z = bank->nearest(FeatureFrame(g, std::vector<double>(g.elements(), 0.0)));
    CHECK(*z.confidence == 0.0);
  }
}

TEST_CASE("fuzz: decoders accept any finite frame") {
  ToyCodecOptions opt;
  opt.features = {4, 16};
  opt.image = {3, 8, 8};
  ToyProjectionCodec codec(opt);
  const Image img = random_image(opt.image, 2);
  codec.bank().add("only", codec.encode(img));
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const double sd = std::pow(10.0, static_cast<double>(rng::draw(seed, 5, 0) % 200) - 100.0);
    const FeatureFrame f(opt.features, gaussian(64, seed, sd));
    const DecodedText d = codec.decode_text(f);
    CHECK(d.text == "only");
    REQUIRE(d.confidence.has_value());
    CHECK(std::isfinite(*d.confidence));
    CHECK(*d.confidence >= -1.0);
    CHECK(*d.confidence <= 1.0);
    const Image out = codec.decode_image(f);
    CHECK(out.geometry == opt.image);
    for (double v : out.values) REQUIRE(std::isfinite(v));
  }
}

TEST_CASE("symbol count is fixed by the feature geometry") {
  for (std::size_t side : {128u, 256u}) {
    ToyCodecOptions opt;
    opt.image = {3, side, side};
    const ToyProjectionCodec codec(opt);
    const FeatureFrame f = codec.encode(random_image(opt.image, side));
    CHECK(f.geometry() == FeatureGeometry{32, 768});
    CHECK(pack_features(f).symbols.symbols.size() == 12288);
  }
}

TEST_CASE("codec outputs are deterministic") {
  ToyCodecOptions opt;
  opt.features = {4, 16};
  opt.image = {3, 8, 8};
  const ToyProjectionCodec a(opt), b(opt);
  const Image img = random_image(opt.image, 5);
  CHECK(a.encode(img) == b.encode(img));
  CHECK(a.decode_image(a.encode(img)) == b.decode_image(b.encode(img)));
  opt.seed = 8;
  CHECK(ToyProjectionCodec(opt).encode(img) != a.encode(img));
}
