#pragma once

#include <span>
#include <vector>

#include "vlfsim/bcr.hpp"

namespace vlfsim {

// Planar C x h x w tensor; source images hold values in [0, 1].
struct Image {
  ImageGeometry geometry;
  std::vector<double> values;

  std::span<const double> data() const noexcept { return values; }
  friend bool operator==(const Image&, const Image&) = default;
};

}  // namespace vlfsim
