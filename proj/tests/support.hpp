#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>

#include <unistd.h>

#include "jinet/jinet.hpp"

namespace jinet::testing {

// Error code raised by f, or nullopt when it returns normally.
template <class F>
std::optional<Errc> error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline Matrix gaussian(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) g(i, j) = normal(rng);
  }
  return g;
}

inline Matrix random_orthonormal(Index n, Index r, std::uint64_t seed) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(n, r, seed));
  return qr.householderQ() * Matrix::Identity(n, r);
}

inline Matrix random_orthogonal(Index r, std::uint64_t seed) { return random_orthonormal(r, r, seed); }

inline Matrix random_symmetric(Index n, std::uint64_t seed) {
  const Matrix g = gaussian(n, n, seed);
  return 0.5 * (g + g.transpose());
}

inline Matrix unit(Index n, Index i) {
  Matrix e = Matrix::Zero(n, 1);
  e(i, 0) = 1.0;
  return e;
}

inline OrthonormalBasis basis(const Matrix& m) { return OrthonormalBasis(m); }

/// Explicit n×n orthogonal projector onto 𝒞(B).
inline Matrix projector_matrix(const Matrix& b) { return b * (b.transpose() * b).inverse() * b.transpose(); }

/// Columns of a Sylvester–Hadamard matrix of order n (a power of two),
/// scaled to unit norm: every entry is ±1/√n.
inline Matrix hadamard_columns(Index n) {
  Matrix h = Matrix::Ones(1, 1);
  while (h.rows() < n) {
    Matrix next(2 * h.rows(), 2 * h.cols());
    next << h, h, h, -h;
    h = next;
  }
  return h / std::sqrt(static_cast<double>(n));
}

// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("jinet_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace jinet::testing
