#pragma once

// Matrix Schur multipliers. The multiplier norm of Phi is the smallest C for
// which Phi(s,t) = <x_s, y_t> with max_s |x_s| * max_t |y_t| <= C, which is
// the same as PSD-feasibility of [[R, Phi], [Phi^*, S]] with diag(R),
// diag(S) <= C.
//
// Pairing convention: <x, y> = sum_i x_i conj(y_i), so Phi = X * Y^*.

#include <cstdint>
#include <optional>
#include <vector>

#include "shm/numerics.hpp"

namespace shm {

/// Rows of X are the vectors x_s, rows of Y the vectors y_t; Phi = X Y^*.
/// Columns of X paired with conjugated columns of Y give the separated form
/// Phi(s,t) = sum_n phi_n(s) psi_n(t).
struct HaagerupFactorization {
  ComplexMatrix X;
  ComplexMatrix Y;
  double bound = 0.0;  ///< max_s |x_s| * max_t |y_t|

  [[nodiscard]] Eigen::Index rank() const { return X.cols(); }
  /// X Y^* (the matrix this factorization represents).
  [[nodiscard]] ComplexMatrix reconstruct() const;
  /// Largest |Phi(s,t) - <x_s, y_t>|.
  [[nodiscard]] double residual(const ComplexMatrix& phi) const;
};

/// Recompute `bound` from the row norms.
double factorization_bound(const ComplexMatrix& X, const ComplexMatrix& Y);

/// Rescale X by a and Y by 1/a so that both have the same largest row norm.
void balance(HaagerupFactorization& f);

/// Finite witness: [[R, Phi], [Phi^*, S]] is PSD with diagonals <= level.
struct PsdBlockCertificate {
  ComplexMatrix R;
  ComplexMatrix S;
  double level = 0.0;

  [[nodiscard]] ComplexMatrix block(const ComplexMatrix& phi) const;
  /// Smallest eigenvalue of the block matrix.
  [[nodiscard]] double min_eigenvalue(const ComplexMatrix& phi) const;
  /// Largest diagonal entry of R and S.
  [[nodiscard]] double max_diagonal() const;
  /// Checks the certificate invariants against phi.
  [[nodiscard]] bool valid_for(const ComplexMatrix& phi) const;
};

/// Gram certificate of a factorization at level `bound` (after balancing).
PsdBlockCertificate certificate_from_factorization(const HaagerupFactorization& f);

struct MultiplierNormResult {
  double lower = 0.0;  ///< C_lo, attained by `lower_witness`
  double upper = 0.0;  ///< C_up, equal to witness.bound
  HaagerupFactorization witness;
  PsdBlockCertificate certificate;
  ComplexMatrix lower_witness;  ///< contraction B with |Phi o B| = lower
  int iterations = 0;           ///< ascent steps + feasibility projections
  bool converged = false;
};

/// Entrywise product.
ComplexMatrix schur_product(const ComplexMatrix& phi, const ComplexMatrix& a);

struct LowerBound {
  double value = 0.0;
  ComplexMatrix witness;  ///< contraction attaining `value`
};

/// Best |Phi o B| over generated contractions: the rectangular identity,
/// coordinate matrices, then `trials` seeded rank-one and unitary matrices.
/// Every candidate is refined by alternating maximization, which keeps it a
/// contraction.
LowerBound multiplier_lower_bound(const ComplexMatrix& phi, int trials, std::uint64_t seed);

/// Dual ascent for max over unit u, v >= 0 of |diag(u) Phi diag(v)|_S1
/// (multiplicative fixed-point update). Used inside multiplier_norm.
struct DualPoint {
  RealVector u;
  RealVector v;
  double value = 0.0;
  int iterations = 0;
};
DualPoint dual_ascent(const ComplexMatrix& phi, RealVector u, RealVector v, int max_iterations = 5000);

/// Contraction B with |Phi o B| >= value of the dual point.
ComplexMatrix contraction_from_dual(const ComplexMatrix& phi, const DualPoint& point);

/// Exact factorization recovered from a dual point (with recursive completion
/// of the block outside the dual support). Empty if recovery fails.
std::optional<HaagerupFactorization> factorization_from_dual(const ComplexMatrix& phi,
                                                             const DualPoint& point);

struct NormOptions {
  std::uint64_t seed = 0;
  int lower_bound_trials = 50;
  int dual_starts = 4;
  int feasibility_budget = 10000;
  int max_bisection_steps = 60;
};

/// Certified bracket [lower, upper] on the multiplier norm with
/// upper - lower <= rel_tol * upper when `converged`.
MultiplierNormResult multiplier_norm(const ComplexMatrix& phi, double rel_tol,
                                     const NormOptions& options = {});

enum class FeasibilityStatus { Feasible, Infeasible, Indeterminate };

struct FeasibilityResult {
  FeasibilityStatus status = FeasibilityStatus::Indeterminate;
  std::optional<PsdBlockCertificate> certificate;  ///< set when Feasible
  /// Lowest level at which a shifted iterate was PSD (always a valid
  /// certificate level, possibly above C).
  double best_repaired_level = 0.0;
  std::optional<PsdBlockCertificate> best_repaired;
  double gap = 0.0;  ///< final Frobenius distance between the two iterates
  int iterations = 0;
  ComplexMatrix last_iterate;  ///< for warm starts
};

struct FeasibilityOptions {
  int max_iterations = 10000;
  int check_every = 20;
  std::optional<ComplexMatrix> warm_start;  ///< (m+n)x(m+n) Hermitian
};

/// Dykstra alternating projection between the PSD cone and the set
/// {off-diagonal block = Phi, diag <= C}. Feasible when an iterate's
/// smallest eigenvalue is >= -1e-9 C; Infeasible when the iterates stall
/// with a gap above `tol`.
FeasibilityResult psd_feasibility(const ComplexMatrix& phi, double level, double tol,
                                  const FeasibilityOptions& options = {});

/// Factor the certified block matrix as G G^*; X = first m rows of G,
/// Y = last n rows. Columns of G with norm <= 1e-10 are dropped.
HaagerupFactorization haagerup_factorize(const PsdBlockCertificate& cert, const ComplexMatrix& phi);

struct ProjectiveCertificate {
  double value = 0.0;         ///< sum_n |phi_n|_inf |psi_n|_inf
  ComplexMatrix represented;  ///< sum_n phi_n^T psi_n
};

/// Rows of `phi_rows` (N x m) are the functions phi_n on S, rows of
/// `psi_rows` (N x n) the functions psi_n on T.
ProjectiveCertificate projective_certificate(const ComplexMatrix& phi_rows,
                                             const ComplexMatrix& psi_rows);

}  // namespace shm
