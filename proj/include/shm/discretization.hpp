#pragma once

// Finite measure spaces, step kernels/symbols on products of cells, the
// conditional expectations P, Q, P (.) Q, and the reductions of
// measure-space multiplier problems to weighted matrix problems.

#include <string>
#include <vector>

#include "shm/numerics.hpp"
#include "shm/schur.hpp"

namespace shm {

/// Finitely many cells with strictly positive masses.
class FiniteMeasureSpace {
 public:
  FiniteMeasureSpace() = default;
  FiniteMeasureSpace(std::vector<std::string> labels, RealVector masses);
  /// Cells labelled "0", "1", ...
  explicit FiniteMeasureSpace(const RealVector& masses);

  [[nodiscard]] Eigen::Index size() const { return masses_.size(); }
  [[nodiscard]] const RealVector& masses() const { return masses_; }
  [[nodiscard]] const std::vector<std::string>& labels() const { return labels_; }
  [[nodiscard]] double total_mass() const { return masses_.sum(); }

 private:
  std::vector<std::string> labels_;
  RealVector masses_;
};

/// Surjective map from fine cell index to coarse cell index.
class Coarsening {
 public:
  Coarsening(std::vector<Eigen::Index> fine_to_coarse, Eigen::Index coarse_count);
  static Coarsening identity(Eigen::Index n);

  [[nodiscard]] Eigen::Index fine_count() const { return static_cast<Eigen::Index>(map_.size()); }
  [[nodiscard]] Eigen::Index coarse_count() const { return coarse_count_; }
  [[nodiscard]] Eigen::Index operator()(Eigen::Index fine) const { return map_[static_cast<std::size_t>(fine)]; }
  [[nodiscard]] const std::vector<Eigen::Index>& map() const { return map_; }

  /// Coarse space: masses summed, labels joined with '+'.
  [[nodiscard]] FiniteMeasureSpace coarsen(const FiniteMeasureSpace& fine) const;
  /// this followed by `next`.
  [[nodiscard]] Coarsening then(const Coarsening& next) const;

 private:
  std::vector<Eigen::Index> map_;
  Eigen::Index coarse_count_ = 0;
};

/// Piecewise-constant function on S x T: value h_jk on S_j x T_k. The S side
/// (rows) is the codomain of the integral operator, the T side its domain.
struct StepFunction {
  FiniteMeasureSpace row_space;  ///< S with mu
  FiniteMeasureSpace col_space;  ///< T with nu
  ComplexMatrix values;

  void validate() const;
};

/// Kernel h of (I_h f)(s) = int_T h(s,t) f(t) dnu(t).
struct StepKernel : StepFunction {};
/// Symbol Phi acting by pointwise multiplication on kernels.
struct StepSymbol : StepFunction {};

/// C with c_jk = sqrt(mu_j) h_jk sqrt(nu_k); |C| = |I_h| on L2(nu) -> L2(mu).
ComplexMatrix kernel_operator_matrix(const StepKernel& k);

/// Operator norm of I_h through kernel_operator_matrix.
double kernel_operator_norm(const StepKernel& k);

/// Multiplier norm of a step symbol: that of its value matrix, independent of
/// the masses.
MultiplierNormResult step_multiplier_norm(const StepSymbol& phi, double rel_tol, const NormOptions& options = {});

/// Mass-weighted average of `values` over products of coarse cells.
ComplexMatrix conditional_expectation(const ComplexMatrix& values, const RealVector& row_masses,
                                      const RealVector& col_masses, const Coarsening& rows,
                                      const Coarsening& cols);

template <typename Step>
Step conditional_expectation(const Step& f, const Coarsening& rows, const Coarsening& cols) {
  f.validate();
  Step out;
  out.values = conditional_expectation(f.values, f.row_space.masses(), f.col_space.masses(), rows, cols);
  out.row_space = rows.coarsen(f.row_space);
  out.col_space = cols.coarsen(f.col_space);
  return out;
}

/// Coarse values lifted back to the fine cells.
ComplexMatrix lift(const ComplexMatrix& coarse, const Coarsening& rows, const Coarsening& cols);

/// sqrt(sum_jk mu_j nu_k |F_jk|^2), the L2(mu x nu) norm.
double weighted_l2_norm(const ComplexMatrix& f, const RealVector& row_masses, const RealVector& col_masses);

struct ContractionReport {
  double fine = 0.0;
  double coarse = 0.0;
  bool holds = false;
};

/// |I_{(P(.)Q)h}| <= |I_h| (tolerance 1e-10 relative).
ContractionReport projection_contracts_operator_norm(const StepKernel& k, const Coarsening& rows,
                                                     const Coarsening& cols);

/// C_up((P(.)Q)Phi) <= C_up(Phi) (1 + 3 rel_tol).
ContractionReport projection_contracts_multiplier_norm(const StepSymbol& phi, const Coarsening& rows,
                                                       const Coarsening& cols, double rel_tol,
                                                       const NormOptions& options = {});

/// Change of measure d(mu0) = xi d(mu), d(nu0) = eta d(nu): masses xi_j mu_j,
/// eta_k nu_k and kernel values h_jk / sqrt(xi_j eta_k). I_h and I_h0 are
/// unitarily equivalent.
StepKernel density_rescale(const StepKernel& k, const RealVector& xi, const RealVector& eta);

/// Same change of measure for a symbol: the values are unchanged, since
/// Phi h0 = (Phi h)0.
StepSymbol density_rescale(const StepSymbol& phi, const RealVector& xi, const RealVector& eta);

struct SymbolApproximation {
  StepSymbol coarse;  ///< Psi = (P(.)Q) Phi on the final partition
  Coarsening rows = Coarsening::identity(0);
  Coarsening cols = Coarsening::identity(0);
  double l2_error = 0.0;  ///< |Phi - Psi|_{L2(mu x nu)}
  int merges = 0;
  ContractionReport norms;  ///< C_up(Psi) against C_up(Phi)
};

/// Greedy coarsening: repeatedly merge the pair of row cells or column cells
/// whose merge keeps the L2 distance to the fine symbol smallest, while that
/// distance stays < epsilon. Ties go to the lowest cell indices, rows first.
SymbolApproximation approximate_symbol(const StepSymbol& fine, double epsilon, double rel_tol,
                                       const NormOptions& options = {});

}  // namespace shm
