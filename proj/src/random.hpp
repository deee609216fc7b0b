#pragma once

#include <cstdint>
#include <random>

#include "shm/numerics.hpp"

namespace shm::detail {

/// Independent generator per (seed, stream) so results do not depend on the
/// order in which streams are consumed.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x5eedu};
  return std::mt19937_64(seq);
}

inline ComplexVector gaussian_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v(i) = Complex(re, im);
  }
  return v;
}

inline ComplexVector unit_gaussian_vector(std::mt19937_64& rng, Eigen::Index n) {
  ComplexVector v = gaussian_vector(rng, n);
  while (v.norm() == 0.0) v = gaussian_vector(rng, n);
  return v / v.norm();
}

inline ComplexMatrix gaussian_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  ComplexMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) m.col(j) = gaussian_vector(rng, rows);
  return m;
}

/// rows x cols matrix with orthonormal columns (rows >= cols) or orthonormal
/// rows (rows < cols); operator norm 1.
inline ComplexMatrix random_isometry(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  const bool tall = rows >= cols;
  const Eigen::Index big = tall ? rows : cols;
  const Eigen::Index small = tall ? cols : rows;
  const ComplexMatrix g = gaussian_matrix(rng, big, small);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(big, small);
  return tall ? q : ComplexMatrix(q.adjoint());
}

}  // namespace shm::detail
