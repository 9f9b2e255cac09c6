#include "vlfsim/bridge.hpp"

#include <bit>
#include <cerrno>
#include <csignal>
#include <cstring>

#include <sys/wait.h>
#include <unistd.h>

#include "vlfsim/errors.hpp"

namespace vlfsim::bridge {

namespace {

void put_u16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::byte>(v & 0xffU));
  out.push_back(static_cast<std::byte>(v >> 8));
}

void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xffU));
}

std::uint16_t get_u16(std::span<const std::byte> in, std::size_t at) {
  return static_cast<std::uint16_t>(std::to_integer<unsigned>(in[at]) | (std::to_integer<unsigned>(in[at + 1]) << 8));
}

std::uint32_t get_u32(std::span<const std::byte> in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | std::to_integer<std::uint32_t>(in[at + static_cast<std::size_t>(i)]);
  return v;
}

void put_magic(Bytes& out, const std::array<char, 4>& magic) {
  for (char c : magic) out.push_back(static_cast<std::byte>(c));
}

bool has_magic(std::span<const std::byte> in, const std::array<char, 4>& magic) {
  if (in.size() < 4) return false;
  for (std::size_t i = 0; i < 4; ++i) {
    if (in[i] != static_cast<std::byte>(magic[i])) return false;
  }
  return true;
}

void put_floats(Bytes& out, std::span<const float> values) {
  out.reserve(out.size() + 4 * values.size());
  for (float f : values) put_u32(out, std::bit_cast<std::uint32_t>(f));
}

std::vector<float> get_floats(std::span<const std::byte> in, std::size_t at, std::size_t count) {
  std::vector<float> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = std::bit_cast<float>(get_u32(in, at + 4 * i));
  return out;
}

void check_version(std::span<const std::byte> in) {
  const std::uint16_t version = get_u16(in, 4);
  if (version != kVersion) throw VersionError("unsupported bridge version " + std::to_string(version));
}

void write_message(Stream& stream, std::uint8_t tag, const Bytes& body) {
  if (body.size() > kMaxBodyBytes) throw ProtocolError("bridge message body too large");
  Bytes header;
  header.push_back(static_cast<std::byte>(tag));
  put_u32(header, static_cast<std::uint32_t>(body.size()));
  stream.write_all(header);
  stream.write_all(body);
}

// nullopt on clean end-of-stream before the header.
std::optional<std::pair<std::uint8_t, Bytes>> read_message(Stream& stream) {
  std::array<std::byte, 5> header{};
  if (!stream.read_exact(header)) return std::nullopt;
  const std::uint32_t length = get_u32(header, 1);
  if (length > kMaxBodyBytes) throw ProtocolError("bridge message body too large");
  Bytes body(length);
  if (length > 0 && !stream.read_exact(body)) throw ProtocolError("bridge stream ended inside a message body");
  return std::make_pair(std::to_integer<std::uint8_t>(header[0]), std::move(body));
}

void put_string(Bytes& out, std::string_view s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  for (char c : s) out.push_back(static_cast<std::byte>(c));
}

std::string get_string(std::span<const std::byte> in, std::size_t& at) {
  if (in.size() - at < 4) throw ProtocolError("SCORE body truncated");
  const std::uint32_t n = get_u32(in, at);
  at += 4;
  if (in.size() - at < n) throw ProtocolError("SCORE body truncated");
  std::string s = to_string(in.subspan(at, n));
  at += n;
  return s;
}

}  // namespace

Bytes encode_frame(const WireFrame& frame) {
  if (frame.payload.size() != static_cast<std::size_t>(frame.n_queries) * frame.dim) {
    throw GeometryError("wire frame payload does not match its geometry");
  }
  Bytes out;
  out.reserve(kFrameHeaderBytes + 4 * frame.payload.size());
  put_magic(out, kFrameMagic);
  put_u16(out, kVersion);
  put_u32(out, frame.n_queries);
  put_u32(out, frame.dim);
  put_floats(out, frame.payload);
  return out;
}

WireFrame decode_wire_frame(std::span<const std::byte> bytes) {
  if (bytes.size() < kFrameHeaderBytes || !has_magic(bytes, kFrameMagic)) {
    throw ProtocolError("not a VLF1 frame");
  }
  check_version(bytes);
  WireFrame frame;
  frame.n_queries = get_u32(bytes, 6);
  frame.dim = get_u32(bytes, 10);
  const std::uint64_t count = static_cast<std::uint64_t>(frame.n_queries) * frame.dim;
  if (bytes.size() - kFrameHeaderBytes != 4 * count) {
    throw ProtocolError("VLF1 payload length " + std::to_string(bytes.size() - kFrameHeaderBytes) +
                        " does not match " + std::to_string(frame.n_queries) + "x" + std::to_string(frame.dim));
  }
  frame.payload = get_floats(bytes, kFrameHeaderBytes, static_cast<std::size_t>(count));
  return frame;
}

Bytes encode_frame(const FeatureFrame& frame) {
  WireFrame wire{static_cast<std::uint32_t>(frame.n_queries()), static_cast<std::uint32_t>(frame.dim()), {}};
  wire.payload.assign(frame.data().begin(), frame.data().end());
  return encode_frame(wire);
}

FeatureFrame decode_frame(std::span<const std::byte> bytes) {
  WireFrame wire = decode_wire_frame(bytes);
  return FeatureFrame(wire.n_queries, wire.dim, std::vector<double>(wire.payload.begin(), wire.payload.end()));
}

Bytes encode_raster(const Image& image) {
  const auto& g = image.geometry;
  if (image.values.size() != g.values()) throw GeometryError("image data does not match geometry");
  Bytes out;
  put_magic(out, kRasterMagic);
  put_u16(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(g.channels));
  put_u32(out, static_cast<std::uint32_t>(g.height));
  put_u32(out, static_cast<std::uint32_t>(g.width));
  const std::vector<float> values(image.values.begin(), image.values.end());
  put_floats(out, values);
  return out;
}

Image decode_raster_body(std::span<const std::byte> bytes) {
  if (bytes.size() < kRasterHeaderBytes || !has_magic(bytes, kRasterMagic)) throw ProtocolError("not an IMG1 raster");
  check_version(bytes);
  const ImageGeometry g{get_u32(bytes, 6), get_u32(bytes, 10), get_u32(bytes, 14)};
  const std::uint64_t count = static_cast<std::uint64_t>(g.channels) * g.height * g.width;
  if (bytes.size() - kRasterHeaderBytes != 4 * count) throw ProtocolError("IMG1 payload length mismatch");
  const auto floats = get_floats(bytes, kRasterHeaderBytes, static_cast<std::size_t>(count));
  return Image{g, std::vector<double>(floats.begin(), floats.end())};
}

bool is_known_op(std::uint8_t op) noexcept { return op >= 1 && op <= 4; }

Bytes encode_score_query(const ScoreQuery& query) {
  Bytes out;
  put_string(out, query.metric);
  put_string(out, query.candidate);
  put_string(out, query.reference);
  return out;
}

ScoreQuery decode_score_query(std::span<const std::byte> body) {
  std::size_t at = 0;
  ScoreQuery q;
  q.metric = get_string(body, at);
  q.candidate = get_string(body, at);
  q.reference = get_string(body, at);
  if (at != body.size()) throw ProtocolError("trailing bytes in SCORE body");
  return q;
}

Bytes to_bytes(std::string_view text) {
  const auto view = std::as_bytes(std::span<const char>(text.data(), text.size()));
  return Bytes(view.begin(), view.end());
}

std::string to_string(std::span<const std::byte> bytes) {
  return std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

FdStream::FdStream(int read_fd, int write_fd, bool owns) : read_fd_(read_fd), write_fd_(write_fd), owns_(owns) {}

FdStream::~FdStream() {
  if (!owns_) return;
  if (read_fd_ >= 0) ::close(read_fd_);
  if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
}

void FdStream::close_write() {
  if (write_fd_ >= 0 && owns_ && write_fd_ != read_fd_) ::close(write_fd_);
  write_fd_ = -1;
}

void FdStream::write_all(std::span<const std::byte> bytes) {
  std::size_t done = 0;
  while (done < bytes.size()) {
    const ssize_t n = ::write(write_fd_, bytes.data() + done, bytes.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("bridge write failed: ") + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

bool FdStream::read_exact(std::span<std::byte> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    const ssize_t n = ::read(read_fd_, out.data() + done, out.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("bridge read failed: ") + std::strerror(errno));
    }
    if (n == 0) {
      if (done == 0) return false;
      throw ProtocolError("bridge stream truncated");
    }
    done += static_cast<std::size_t>(n);
  }
  return true;
}

void write_request(Stream& stream, const Request& request) { write_message(stream, request.op, request.body); }

std::optional<Request> read_request(Stream& stream) {
  auto msg = read_message(stream);
  if (!msg) return std::nullopt;
  return Request{msg->first, std::move(msg->second)};
}

void write_response(Stream& stream, const Response& response) {
  write_message(stream, static_cast<std::uint8_t>(response.status), response.body);
}

Response read_response(Stream& stream) {
  auto msg = read_message(stream);
  if (!msg) throw ProtocolError("bridge closed the connection before responding");
  if (msg->first > 1) throw ProtocolError("invalid bridge status byte");
  return Response{static_cast<Status>(msg->first), std::move(msg->second)};
}

Subprocess::Subprocess(const std::string& command) {
  // A dead backend must surface as a write error, not kill the simulator.
  std::signal(SIGPIPE, SIG_IGN);
  int to_child[2];
  int from_child[2];
  if (::pipe(to_child) != 0) throw ConfigError("pipe() failed");
  if (::pipe(from_child) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw ConfigError("pipe() failed");
  }
  pid_ = ::fork();
  if (pid_ < 0) throw ConfigError("fork() failed");
  if (pid_ == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  stream_ = std::make_unique<FdStream>(from_child[0], to_child[1]);
}

int Subprocess::finish() {
  if (pid_ <= 0) return 0;
  stream_->close_write();
  int status = 0;
  ::waitpid(pid_, &status, 0);
  pid_ = -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Subprocess::~Subprocess() { finish(); }

BridgeCodec::BridgeCodec(std::unique_ptr<Stream> stream, FeatureGeometry geometry)
    : owned_stream_(std::move(stream)), stream_(owned_stream_.get()), geometry_(geometry) {
  if (!stream_) throw ConfigError("bridge codec needs a stream");
}

BridgeCodec::BridgeCodec(std::unique_ptr<Subprocess> process, FeatureGeometry geometry)
    : process_(std::move(process)), stream_(&process_->stream()), geometry_(geometry) {}

Bytes BridgeCodec::call(Op op, Bytes body) const {
  std::lock_guard lock(mutex_);
  write_request(*stream_, Request{static_cast<std::uint8_t>(op), std::move(body)});
  Response response = read_response(*stream_);
  if (response.status == Status::Error) throw ProtocolError("bridge backend error: " + to_string(response.body));
  return std::move(response.body);
}

FeatureFrame BridgeCodec::encode(const Image& image) const {
  FeatureFrame frame = decode_frame(call(Op::EncodeImage, encode_raster(image)));
  if (frame.geometry() != geometry_) throw GeometryError("bridge encoder returned an unexpected frame geometry");
  return frame;
}

DecodedText BridgeCodec::decode_text(const FeatureFrame& frame) const {
  return DecodedText{to_string(call(Op::DecodeText, encode_frame(frame))), std::nullopt};
}

Image BridgeCodec::decode_image(const FeatureFrame& frame) const {
  const Bytes reply = call(Op::DecodeImage, encode_frame(frame));
  if (has_magic(reply, kFrameMagic)) {
    const WireFrame wire = decode_wire_frame(reply);
    return Image{ImageGeometry{1, wire.n_queries, wire.dim},
                 std::vector<double>(wire.payload.begin(), wire.payload.end())};
  }
  return decode_raster_body(reply);
}

double BridgeCodec::score(const ScoreQuery& query) const {
  const Bytes reply = call(Op::Score, encode_score_query(query));
  if (reply.size() != 8) throw ProtocolError("SCORE reply must be one float64");
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | std::to_integer<std::uint64_t>(reply[static_cast<std::size_t>(i)]);
  return std::bit_cast<double>(bits);
}

ExternalScorer make_bridge_scorer(std::shared_ptr<const BridgeCodec> codec, std::string metric) {
  return [codec = std::move(codec), metric = std::move(metric)](const TrialArtifacts& a) {
    if (!a.received_text || !a.reference_text) throw ConfigError("bridge scorer needs text artifacts");
    return codec->score(ScoreQuery{metric, *a.received_text, *a.reference_text});
  };
}

}  // namespace vlfsim::bridge
