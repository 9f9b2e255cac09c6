#include "support/loopback_server.hpp"

#include <bit>

#include "vlfsim/harness.hpp"
#include "vlfsim/metrics.hpp"

namespace loopback {

using namespace vlfsim;
using namespace vlfsim::bridge;

ToyCodecOptions toy_options() { return ToyCodecOptions{FeatureGeometry{4, 16}, ImageGeometry{3, 8, 8}, 21, 8}; }

std::shared_ptr<ToyProjectionCodec> make_toy_codec() {
  auto codec = std::make_shared<ToyProjectionCodec>(toy_options());
  const Dataset data = synthetic_dataset(4, toy_options().image, 3);
  for (const auto& item : data.items) codec->bank().add(item.caption, codec->encode(*item.image));
  return codec;
}

namespace {

Bytes f64_bytes(double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  Bytes out(8);
  for (std::size_t i = 0; i < 8; ++i) out[i] = static_cast<std::byte>((bits >> (8 * i)) & 0xffU);
  return out;
}

Response handle(const Request& req, Backend backend, const ToyProjectionCodec* toy) {
  if (!is_known_op(req.op)) return Response{Status::Error, to_bytes("unknown op " + std::to_string(req.op))};
  const auto op = static_cast<Op>(req.op);
  if (backend == Backend::Echo) {
    if (op == Op::Score) return Response{Status::Ok, f64_bytes(0.5)};
    return Response{Status::Ok, req.body};
  }
  switch (op) {
    case Op::EncodeImage:
      return Response{Status::Ok, encode_frame(toy->encode(decode_raster_body(req.body)))};
    case Op::DecodeText:
      return Response{Status::Ok, to_bytes(toy->decode_text(decode_frame(req.body)).text)};
    case Op::DecodeImage:
      return Response{Status::Ok, encode_raster(toy->decode_image(decode_frame(req.body)))};
    case Op::Score: {
      const ScoreQuery q = decode_score_query(req.body);
      return Response{Status::Ok, f64_bytes(bleu(q.candidate, q.reference))};
    }
  }
  return Response{Status::Error, to_bytes("unreachable")};
}

}  // namespace

void serve(Stream& stream, Backend backend) {
  std::shared_ptr<ToyProjectionCodec> toy;
  if (backend == Backend::Toy) toy = make_toy_codec();
  for (;;) {
    std::optional<Request> req;
    try {
      req = read_request(stream);
    } catch (const std::exception&) {
      return;  // truncated stream: drop the connection
    }
    if (!req) return;
    Response resp;
    try {
      resp = handle(*req, backend, toy.get());
    } catch (const std::exception& e) {
      resp = Response{Status::Error, to_bytes(e.what())};
    }
    write_response(stream, resp);
  }
}

}  // namespace loopback
