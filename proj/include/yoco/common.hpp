#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace yoco {

// Row-major dense types: rows are samples, matching the on-disk layouts.
template <class Scalar>
using MatrixRX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixRXf = MatrixRX<float>;
using MatrixRXd = MatrixRX<double>;

template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Loss selector shared by the trainer and the log format; the numeric
// values are the on-disk u8 tags.
enum class LossKind : std::uint8_t {
  cross_entropy = 0,
  mse = 1,
};

// Error taxonomy. The CLI maps these to its stable exit codes:
// ConfigError -> 2, IoError -> 3, NumericError -> 4, InfeasibleError -> 5.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// splitmix64 finalizer. Derives independent deterministic RNG streams from
// (seed, stream) so per-class / per-bin work stays order-independent.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// FNV-1a 64-bit, used for config and log digests.
inline std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const unsigned char* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& text) {
  return fnv1a64(text.data(), text.size());
}

}  // namespace yoco
