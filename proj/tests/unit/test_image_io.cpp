#include <doctest.h>

#include <cstring>
#include <string>
#include <vector>

#include "vlfsim/errors.hpp"
#include "vlfsim/image_io.hpp"

using namespace vlfsim;

namespace {

Image decode(const std::string& s) {
  return decode_raster(std::as_bytes(std::span<const char>(s.data(), s.size())));
}

}  // namespace

TEST_CASE("ASCII PPM and PGM") {
  const Image rgb = decode("P3\n# comment\n2 1\n255\n255 0 0   0 0 255\n");
  CHECK(rgb.geometry == ImageGeometry{3, 1, 2});
  // Planar: all red values, then green, then blue.
  CHECK(rgb.values == std::vector<double>{1, 0, 0, 0, 0, 1});

  const Image grey = decode("P2 2 2 4  0 1 2 4");
  CHECK(grey.geometry == ImageGeometry{1, 2, 2});
  CHECK(grey.values == std::vector<double>{0, 0.25, 0.5, 1});
}

TEST_CASE("binary PPM roundtrip at 8 bits") {
  Image img{{3, 3, 5}, std::vector<double>(45)};
  for (std::size_t i = 0; i < img.values.size(); ++i) img.values[i] = static_cast<double>((i * 37) % 256) / 255.0;
  const Image back = decode(encode_ppm(img));
  CHECK(back.geometry == img.geometry);
  for (std::size_t i = 0; i < img.values.size(); ++i) CHECK(back.values[i] == doctest::Approx(img.values[i]));

  Image grey{{1, 2, 2}, {0.0, 0.5, 1.0, 2.0}};
  const std::string pgm = encode_ppm(grey);
  CHECK(pgm.rfind("P5", 0) == 0);
  CHECK(decode(pgm).values.back() == 1.0);  // clamped
}

TEST_CASE("16-bit binary PPM") {
  std::string s = "P6 1 1 65535\n";
  const unsigned char px[6] = {0xff, 0xff, 0x80, 0x00, 0x00, 0x00};
  s.append(reinterpret_cast<const char*>(px), 6);
  const Image img = decode(s);
  CHECK(img.values[0] == 1.0);
  CHECK(img.values[1] == doctest::Approx(32768.0 / 65535.0));
  CHECK(img.values[2] == 0.0);
}

TEST_CASE("farbfeld") {
  std::string s = "farbfeld";
  const unsigned char dims[8] = {0, 0, 0, 1, 0, 0, 0, 1};
  s.append(reinterpret_cast<const char*>(dims), 8);
  const unsigned char px[8] = {0xff, 0xff, 0, 0, 0x80, 0x00, 0x12, 0x34};  // alpha dropped
  s.append(reinterpret_cast<const char*>(px), 8);
  const Image img = decode(s);
  CHECK(img.geometry == ImageGeometry{3, 1, 1});
  CHECK(img.values[0] == 1.0);
  CHECK(img.values[1] == 0.0);
  CHECK(img.values[2] == doctest::Approx(32768.0 / 65535.0));
}

TEST_CASE("malformed rasters") {
  CHECK_THROWS_AS(decode(""), DataError);
  CHECK_THROWS_AS(decode("GIF89a"), DataError);
  CHECK_THROWS_AS(decode("P6 2 2 255\nabc"), DataError);
  CHECK_THROWS_AS(decode("P3 1 1 255 300 0 0"), DataError);
  CHECK_THROWS_AS(decode("P2 0 1 255"), DataError);
  CHECK_THROWS_AS(decode("P5 1 1 70000 x"), DataError);
  CHECK_THROWS_AS(decode(std::string("farbfeld\0\0\0\1\0\0\0\1", 16)), DataError);
  CHECK_THROWS_AS(read_image("/nonexistent/image.ppm"), DataError);
}
