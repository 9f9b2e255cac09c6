#pragma once

#include <stdexcept>

namespace vlfsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape or length contract violated (odd element counts, mismatched sizes).
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Non-finite or otherwise unusable numeric input.
class DataError : public Error {
 public:
  using Error::Error;
};

// Frame whose normalization or cosine is undefined (all zeros).
class DegenerateFrameError : public Error {
 public:
  using Error::Error;
};

class CsiUnavailableError : public Error {
 public:
  using Error::Error;
};

// Bit-level length accounting broken.
class FramingError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class VersionError : public Error {
 public:
  using Error::Error;
};

// Codec bridge wire violations and remote ERROR responses.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace vlfsim
