#include "vlfsim/bcr.hpp"

#include <numeric>

#include "vlfsim/errors.hpp"

namespace vlfsim {

Rational Rational::reduced(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw GeometryError("rational with zero denominator");
  const std::uint64_t g = std::gcd(num, den);
  return g == 0 ? Rational{0, 1} : Rational{num / g, den / g};
}

std::string Rational::to_string() const {
  return std::to_string(num) + "/" + std::to_string(den);
}

std::uint64_t channel_uses(std::size_t n_queries, std::size_t dim) {
  if (n_queries == 0 || dim == 0) throw GeometryError("feature geometry must be positive");
  const std::uint64_t elements = static_cast<std::uint64_t>(n_queries) * dim;
  if (elements % 2 != 0) throw GeometryError("N*d must be even to pair reals into symbols");
  return elements / 2;
}

Rational compute_bcr(std::size_t n_queries, std::size_t dim, const ImageGeometry& image) {
  const std::uint64_t uses = channel_uses(n_queries, dim);
  if (image.values() == 0) throw GeometryError("image geometry must be non-empty");
  return Rational::reduced(uses, static_cast<std::uint64_t>(image.values()));
}

}  // namespace vlfsim
