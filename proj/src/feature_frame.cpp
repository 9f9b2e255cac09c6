#include "vlfsim/feature_frame.hpp"

#include <cmath>
#include <string>

#include "vlfsim/errors.hpp"
#include "vlfsim/kernels.hpp"

namespace vlfsim {

FeatureFrame::FeatureFrame(std::size_t n_queries, std::size_t dim, std::vector<double> data)
    : geometry_{n_queries, dim}, data_(std::move(data)) {
  if (n_queries == 0 || dim == 0) throw GeometryError("feature frame needs positive geometry");
  if (data_.size() != n_queries * dim) {
    throw GeometryError("feature frame holds " + std::to_string(data_.size()) + " values, expected " +
                        std::to_string(n_queries * dim));
  }
  if (data_.size() % 2 != 0) throw GeometryError("feature frame element count must be even");
  for (double v : data_) {
    if (!std::isfinite(v)) throw DataError("feature frame contains a non-finite value");
  }
}

PackedFrame pack_features(const FeatureFrame& frame, double target_power) {
  if (!(target_power > 0.0) || !std::isfinite(target_power)) {
    throw ConfigError("target power must be positive and finite");
  }
  const std::size_t n_symbols = frame.size() / 2;
  const double energy = kernels::parallel::sum_squares(frame.data());
  if (energy == 0.0) throw DegenerateFrameError("cannot normalize an all-zero feature frame");

  const double scale = std::sqrt(target_power * static_cast<double>(n_symbols) / energy);
  PackedFrame packed;
  packed.symbols.symbols.resize(n_symbols);
  packed.symbols.scale = scale;
  packed.symbols.target_power = target_power;
  kernels::parallel::pack(frame.data(), scale, packed.symbols.symbols);
  packed.record = NormalizationRecord{scale, frame.n_queries(), frame.dim()};
  return packed;
}

FeatureFrame unpack_features(const SymbolFrame& symbols, const NormalizationRecord& record) {
  if (2 * symbols.symbols.size() != record.n_queries * record.dim) {
    throw GeometryError("normalization record geometry " + std::to_string(record.n_queries) + "x" +
                        std::to_string(record.dim) + " does not match " +
                        std::to_string(symbols.symbols.size()) + " symbols");
  }
  if (!(record.scale > 0.0) || !std::isfinite(record.scale)) {
    throw DataError("normalization scale must be positive and finite");
  }
  std::vector<double> data(record.n_queries * record.dim);
  kernels::parallel::unpack(symbols.symbols, 1.0 / record.scale, data);
  return FeatureFrame(record.n_queries, record.dim, std::move(data));
}

}  // namespace vlfsim
