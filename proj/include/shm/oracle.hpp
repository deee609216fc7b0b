#pragma once

// Brute-force lower bounds on transformer norms, independent of the
// factorization machinery in schur.hpp. The S1 transformer norm is a supremum
// over rank-one inputs u v^*, which is explored by multi-start projected
// gradient ascent on the product of unit spheres.

#include <cstdint>
#include <functional>

#include "shm/numerics.hpp"

namespace shm {

struct OracleEstimate {
  double value = 0.0;  ///< certified lower bound on the transformer norm
  ComplexVector argmax_u;
  ComplexVector argmax_v;
  int restarts = 0;
  std::uint64_t seed = 0;
  int best_start = -1;
};

/// A linear transformer evaluated on rank-one inputs u v^*. `image` returns
/// the transformed operator; `gradient` returns the ascent directions of
/// Re tr(K^* image(u, v)) with respect to u and v for a fixed subgradient K.
struct RankOneTransformer {
  Eigen::Index u_dim = 0;
  Eigen::Index v_dim = 0;
  std::function<ComplexMatrix(const ComplexVector&, const ComplexVector&)> image;
  std::function<std::pair<ComplexVector, ComplexVector>(const ComplexVector&, const ComplexVector&,
                                                        const ComplexMatrix&)>
      gradient;
};

/// Multi-start ascent for sup over unit u, v of |image(u, v)|_S1. Start i is
/// a seeded Gaussian pair for even i and the next coordinate pair for odd i
/// (Gaussian once coordinate pairs run out), so the starts for K restarts are
/// a prefix of the starts for any larger K.
OracleEstimate maximize_rank_one(const RankOneTransformer& transformer, int restarts, std::uint64_t seed);

/// sup over unit u, v of |diag(u) Phi diag(conj v)|_S1 = |Phi o (u v^*)|_S1.
OracleEstimate s1_transformer_norm(const ComplexMatrix& phi, int restarts = 64, std::uint64_t seed = 0);

/// Number of worker threads used for restarts: SHM_THREADS when set,
/// otherwise the hardware concurrency.
int restart_threads();

struct DualityReport {
  double s1_value = 0.0;        ///< trace-class side
  double operator_value = 0.0;  ///< operator-norm side (multiplier_lower_bound)
  double lower = 0.0;           ///< multiplier_norm bracket
  double upper = 0.0;
  bool violation = false;       ///< s1_value > upper (1 + 1e-6)
};

DualityReport duality_gap_check(const ComplexMatrix& phi, int restarts = 64, std::uint64_t seed = 0,
                                double rel_tol = 1e-4);

}  // namespace shm
