#pragma once

// Primary side of the external-codec wire protocol (see PROTOCOL.md). Frames
// travel as little-endian float32, so encode/decode of a WireFrame is
// bit-exact, while FeatureFrame (double) round-trips through float32.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vlfsim/codec.hpp"
#include "vlfsim/metrics.hpp"

namespace vlfsim::bridge {

using Bytes = std::vector<std::byte>;

inline constexpr std::array<char, 4> kFrameMagic{'V', 'L', 'F', '1'};
inline constexpr std::array<char, 4> kRasterMagic{'I', 'M', 'G', '1'};
inline constexpr std::uint16_t kVersion = 1;
// magic(4) + version(2) + n_queries(4) + dim(4)
inline constexpr std::size_t kFrameHeaderBytes = 14;
// magic(4) + version(2) + channels(4) + height(4) + width(4)
inline constexpr std::size_t kRasterHeaderBytes = 18;
inline constexpr std::uint32_t kMaxBodyBytes = 1U << 30;

struct WireFrame {
  std::uint32_t n_queries = 0;
  std::uint32_t dim = 0;
  std::vector<float> payload;  // row-major, n_queries * dim
};

Bytes encode_frame(const WireFrame& frame);
WireFrame decode_wire_frame(std::span<const std::byte> bytes);

Bytes encode_frame(const FeatureFrame& frame);
// GeometryError/DataError when the payload violates FeatureFrame invariants.
FeatureFrame decode_frame(std::span<const std::byte> bytes);

Bytes encode_raster(const Image& image);
Image decode_raster_body(std::span<const std::byte> bytes);

enum class Op : std::uint8_t { EncodeImage = 1, DecodeText = 2, DecodeImage = 3, Score = 4 };
enum class Status : std::uint8_t { Ok = 0, Error = 1 };

bool is_known_op(std::uint8_t op) noexcept;

// Wire layout: op u8 | body length u32 LE | body.
struct Request {
  std::uint8_t op = 0;  // raw byte so unknown codes survive the round trip
  Bytes body;
};

// Wire layout: status u8 | body length u32 LE | body. ERROR bodies are a
// UTF-8 message.
struct Response {
  Status status = Status::Ok;
  Bytes body;
};

// SCORE body: three length-prefixed (u32 LE) UTF-8 strings.
struct ScoreQuery {
  std::string metric;
  std::string candidate;
  std::string reference;
};
Bytes encode_score_query(const ScoreQuery& query);
ScoreQuery decode_score_query(std::span<const std::byte> body);

class Stream {
 public:
  virtual ~Stream() = default;
  virtual void write_all(std::span<const std::byte> bytes) = 0;
  // Returns false on end-of-stream before the first byte; ProtocolError if
  // the stream ends part-way.
  virtual bool read_exact(std::span<std::byte> out) = 0;
};

// Pair of POSIX descriptors (pipes, socketpair halves).
class FdStream final : public Stream {
 public:
  FdStream(int read_fd, int write_fd, bool owns = true);
  ~FdStream() override;
  FdStream(const FdStream&) = delete;
  FdStream& operator=(const FdStream&) = delete;

  void write_all(std::span<const std::byte> bytes) override;
  bool read_exact(std::span<std::byte> out) override;
  void close_write();

 private:
  int read_fd_;
  int write_fd_;
  bool owns_;
};

void write_request(Stream& stream, const Request& request);
std::optional<Request> read_request(Stream& stream);
void write_response(Stream& stream, const Response& response);
Response read_response(Stream& stream);

Bytes to_bytes(std::string_view text);
std::string to_string(std::span<const std::byte> bytes);

// A child process started via /bin/sh -c whose stdin/stdout carry the protocol.
class Subprocess {
 public:
  explicit Subprocess(const std::string& command);
  ~Subprocess();
  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  Stream& stream() noexcept { return *stream_; }
  // Closes the child's stdin and reaps it; returns its exit status.
  int finish();

 private:
  int pid_ = -1;
  std::unique_ptr<FdStream> stream_;
};

/// SemanticCodec served by an out-of-process backend. One request is in
/// flight at a time, so concurrent() is false.
class BridgeCodec final : public SemanticCodec {
 public:
  BridgeCodec(std::unique_ptr<Stream> stream, FeatureGeometry geometry);
  BridgeCodec(std::unique_ptr<Subprocess> process, FeatureGeometry geometry);

  FeatureGeometry feature_geometry() const override { return geometry_; }
  FeatureFrame encode(const Image& image) const override;
  DecodedText decode_text(const FeatureFrame& frame) const override;
  // An IMG1 reply is the image; a VLF1 reply (echo backends) becomes a
  // 1 x n_queries x dim image.
  Image decode_image(const FeatureFrame& frame) const override;
  bool concurrent() const override { return false; }

  double score(const ScoreQuery& query) const;
  // ProtocolError if the backend answers ERROR.
  Bytes call(Op op, Bytes body) const;

 private:
  std::unique_ptr<Subprocess> process_;
  std::unique_ptr<Stream> owned_stream_;
  Stream* stream_;
  FeatureGeometry geometry_;
  mutable std::mutex mutex_;
};

// Scores received vs reference text through the backend's SCORE op.
ExternalScorer make_bridge_scorer(std::shared_ptr<const BridgeCodec> codec, std::string metric);

}  // namespace vlfsim::bridge
