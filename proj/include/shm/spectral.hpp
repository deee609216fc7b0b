#pragma once

// Finite atomic spectral measures, double operator integrals
// sum_jk Phi(x_j, y_k) P_j T Q_k, and the check that the transformer norm of
// T -> doi(Phi, E1, E2, T) equals the multiplier norm of the value matrix.

#include <functional>
#include <vector>

#include "shm/numerics.hpp"
#include "shm/oracle.hpp"
#include "shm/schur.hpp"

namespace shm {

/// Distinct real points x_j with orthogonal projections P_j summing to I.
class FiniteSpectralMeasure {
 public:
  FiniteSpectralMeasure(RealVector points, std::vector<ComplexMatrix> projections);

  [[nodiscard]] Eigen::Index size() const { return points_.size(); }
  [[nodiscard]] Eigen::Index dimension() const { return projections_.front().rows(); }
  [[nodiscard]] const RealVector& points() const { return points_; }
  [[nodiscard]] const std::vector<ComplexMatrix>& projections() const { return projections_; }
  [[nodiscard]] const ComplexMatrix& projection(Eigen::Index j) const {
    return projections_[static_cast<std::size_t>(j)];
  }
  /// Ranks of the projections (rounded traces).
  [[nodiscard]] std::vector<Eigen::Index> ranks() const;
  /// sum_j f(x_j) P_j
  [[nodiscard]] ComplexMatrix apply(const std::function<Complex(double)>& f) const;

 private:
  RealVector points_;
  std::vector<ComplexMatrix> projections_;
};

constexpr double kDefaultGroupTolerance = 1e-8;

/// Spectral measure of a Hermitian matrix. Neighbouring eigenvalues are
/// grouped when their gap is <= group_tol (1 + |lambda|); each group becomes
/// one point (the group mean) with the sum of its eigenprojections.
FiniteSpectralMeasure spectral_measure_of_hermitian(const ComplexMatrix& a,
                                                    double group_tol = kDefaultGroupTolerance);

/// Phi_jk = Phi(x_j, y_k).
struct SymbolOnSpectra {
  ComplexMatrix values;

  /// Evaluates `f` once at every pair of points.
  static SymbolOnSpectra evaluate(const FiniteSpectralMeasure& e1, const FiniteSpectralMeasure& e2,
                                  const std::function<Complex(double, double)>& f);
  void validate(const FiniteSpectralMeasure& e1, const FiniteSpectralMeasure& e2) const;
};

/// sum_jk Phi_jk P_j T Q_k.
ComplexMatrix doi(const SymbolOnSpectra& phi, const FiniteSpectralMeasure& e1, const FiniteSpectralMeasure& e2,
                  const ComplexMatrix& t);

struct HsBoundReport {
  double lhs = 0.0;  ///< |doi(Phi, E1, E2, T)|_S2
  double rhs = 0.0;  ///< max |Phi_jk| * |T|_S2
  bool holds = false;
};

HsBoundReport doi_hs_bound_check(const SymbolOnSpectra& phi, const FiniteSpectralMeasure& e1,
                                 const FiniteSpectralMeasure& e2, const ComplexMatrix& t);

/// Multiplier-norm bracket of the value matrix.
MultiplierNormResult spectral_multiplier_norm(const SymbolOnSpectra& phi, const FiniteSpectralMeasure& e1,
                                              const FiniteSpectralMeasure& e2, double rel_tol,
                                              const NormOptions& options = {});

/// sup over unit u, v of |sum_jk Phi_jk (P_j u)(Q_k v)^*|_S1.
OracleEstimate spectral_transformer_oracle(const SymbolOnSpectra& phi, const FiniteSpectralMeasure& e1,
                                           const FiniteSpectralMeasure& e2, int restarts = 64,
                                           std::uint64_t seed = 0);

struct IsometryReport {
  MultiplierNormResult bracket;
  OracleEstimate oracle;
  double witness_residual = 0.0;
  bool oracle_below_upper = false;  ///< oracle <= C_up (1 + 1e-6)
  bool gap_closed = false;          ///< C_up - max(oracle, C_lo) <= rel_tol C_up
  bool pass = false;
};

IsometryReport verify_isometry(const SymbolOnSpectra& phi, const FiniteSpectralMeasure& e1,
                               const FiniteSpectralMeasure& e2, double rel_tol, int restarts = 64,
                               std::uint64_t seed = 0);

}  // namespace shm
