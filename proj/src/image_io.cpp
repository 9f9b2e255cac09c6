#include "vlfsim/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <vector>

#include "vlfsim/errors.hpp"

namespace vlfsim {

namespace {

class Cursor {
 public:
  explicit Cursor(std::span<const std::byte> bytes) : bytes_(bytes) {}

  bool at_end() const { return pos_ >= bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  unsigned char byte() {
    if (at_end()) throw DataError("raster truncated");
    return static_cast<unsigned char>(bytes_[pos_++]);
  }

  void skip_space_and_comments() {
    while (!at_end()) {
      const auto c = static_cast<unsigned char>(bytes_[pos_]);
      if (c == '#') {
        while (!at_end() && static_cast<unsigned char>(bytes_[pos_]) != '\n') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t header_number() {
    skip_space_and_comments();
    std::size_t value = 0;
    std::size_t digits = 0;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (static_cast<unsigned char>(bytes_[pos_]) - '0');
      if (value > (1U << 28)) throw DataError("raster header value too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw DataError("malformed raster header");
    return value;
  }

  std::uint32_t be32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | byte();
    return v;
  }

  std::uint16_t be16() {
    const auto hi = byte();
    return static_cast<std::uint16_t>((hi << 8) | byte());
  }

 private:
  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

Image decode_netpbm(Cursor& in, char kind) {
  const std::size_t channels = (kind == '3' || kind == '6') ? 3 : 1;
  const bool ascii = kind == '2' || kind == '3';
  const std::size_t width = in.header_number();
  const std::size_t height = in.header_number();
  const std::size_t maxval = in.header_number();
  if (width == 0 || height == 0) throw DataError("raster has zero size");
  if (maxval == 0 || maxval > 65535) throw DataError("raster maxval out of range");

  Image img{ImageGeometry{channels, height, width}, std::vector<double>(channels * height * width)};
  const std::size_t plane = height * width;
  const double inv = 1.0 / static_cast<double>(maxval);

  if (!ascii) {
    in.byte();  // single whitespace after maxval
    const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
    if (in.remaining() < img.values.size() * sample_bytes) throw DataError("raster truncated");
  }
  for (std::size_t p = 0; p < plane; ++p) {
    for (std::size_t c = 0; c < channels; ++c) {
      std::size_t v = 0;
      if (ascii) {
        v = in.header_number();
      } else {
        v = maxval > 255 ? in.be16() : in.byte();
      }
      if (v > maxval) throw DataError("raster sample exceeds maxval");
      img.values[c * plane + p] = static_cast<double>(v) * inv;
    }
  }
  return img;
}

Image decode_farbfeld(Cursor& in) {
  const std::size_t width = in.be32();
  const std::size_t height = in.be32();
  if (width == 0 || height == 0) throw DataError("farbfeld image has zero size");
  if (in.remaining() / 8 / width < height) throw DataError("farbfeld image truncated");
  Image img{ImageGeometry{3, height, width}, std::vector<double>(3 * height * width)};
  const std::size_t plane = height * width;
  for (std::size_t p = 0; p < plane; ++p) {
    for (std::size_t c = 0; c < 3; ++c) img.values[c * plane + p] = in.be16() / 65535.0;
    in.be16();  // alpha
  }
  return img;
}

}  // namespace

Image decode_raster(std::span<const std::byte> bytes) {
  Cursor in(bytes);
  const auto a = in.byte();
  const auto b = in.byte();
  if (a == 'P' && b >= '2' && b <= '6' && b != '4') return decode_netpbm(in, static_cast<char>(b));
  if (a == 'f' && b == 'a') {
    const char* rest = "rbfeld";
    for (const char* p = rest; *p; ++p) {
      if (in.byte() != static_cast<unsigned char>(*p)) throw DataError("bad farbfeld magic");
    }
    return decode_farbfeld(in);
  }
  throw DataError("unrecognized raster format");
}

Image read_image(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot open image '" + path.string() + "'");
  std::vector<char> raw((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  try {
    return decode_raster(std::as_bytes(std::span<const char>(raw)));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string encode_ppm(const Image& image) {
  const auto& g = image.geometry;
  if (g.channels != 1 && g.channels != 3) throw GeometryError("PPM output needs 1 or 3 channels");
  if (image.values.size() != g.values()) throw GeometryError("image data does not match geometry");
  std::string out = (g.channels == 3 ? "P6\n" : "P5\n") + std::to_string(g.width) + " " +
                    std::to_string(g.height) + "\n255\n";
  const std::size_t plane = g.pixels();
  for (std::size_t p = 0; p < plane; ++p) {
    for (std::size_t c = 0; c < g.channels; ++c) {
      const double v = std::clamp(image.values[c * plane + p], 0.0, 1.0);
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
    }
  }
  return out;
}

void write_ppm(const std::filesystem::path& path, const Image& image) {
  const std::string data = encode_ppm(image);
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write image '" + path.string() + "'");
  file.write(data.data(), static_cast<std::streamsize>(data.size()));
}

}  // namespace vlfsim
