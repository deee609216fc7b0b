#include "shm/discretization.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "shm/errors.hpp"

namespace shm {

namespace {

void require_positive_masses(const RealVector& masses, const char* op) {
  for (Eigen::Index i = 0; i < masses.size(); ++i) {
    if (!std::isfinite(masses(i)) || masses(i) <= 0.0) {
      throw ValidationError(std::string(op) + ": masses must be finite and strictly positive");
    }
  }
}

std::vector<std::string> default_labels(Eigen::Index n) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return labels;
}

void require_matches(const Coarsening& c, Eigen::Index fine, const char* op) {
  if (c.fine_count() != fine) {
    throw ValidationError(std::string(op) + ": coarsening does not match the number of fine cells");
  }
}

}  // namespace

FiniteMeasureSpace::FiniteMeasureSpace(std::vector<std::string> labels, RealVector masses)
    : labels_(std::move(labels)), masses_(std::move(masses)) {
  if (static_cast<Eigen::Index>(labels_.size()) != masses_.size()) {
    throw DimensionError("FiniteMeasureSpace: one label per mass");
  }
  require_positive_masses(masses_, "FiniteMeasureSpace");
  if (!std::isfinite(masses_.sum())) throw ValidationError("FiniteMeasureSpace: total mass must be finite");
}

FiniteMeasureSpace::FiniteMeasureSpace(const RealVector& masses)
    : FiniteMeasureSpace(default_labels(masses.size()), masses) {}

Coarsening::Coarsening(std::vector<Eigen::Index> fine_to_coarse, Eigen::Index coarse_count)
    : map_(std::move(fine_to_coarse)), coarse_count_(coarse_count) {
  std::vector<bool> hit(static_cast<std::size_t>(std::max<Eigen::Index>(coarse_count_, 0)), false);
  for (Eigen::Index c : map_) {
    if (c < 0 || c >= coarse_count_) throw ValidationError("Coarsening: coarse index out of range");
    hit[static_cast<std::size_t>(c)] = true;
  }
  for (bool h : hit) {
    if (!h) throw ValidationError("Coarsening: map must be surjective");
  }
}

Coarsening Coarsening::identity(Eigen::Index n) {
  std::vector<Eigen::Index> map(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) map[static_cast<std::size_t>(i)] = i;
  return Coarsening(std::move(map), n);
}

FiniteMeasureSpace Coarsening::coarsen(const FiniteMeasureSpace& fine) const {
  require_matches(*this, fine.size(), "Coarsening::coarsen");
  RealVector masses = RealVector::Zero(coarse_count_);
  std::vector<std::string> labels(static_cast<std::size_t>(coarse_count_));
  for (Eigen::Index i = 0; i < fine.size(); ++i) {
    const auto c = static_cast<std::size_t>(map_[static_cast<std::size_t>(i)]);
    masses(static_cast<Eigen::Index>(c)) += fine.masses()(i);
    if (!labels[c].empty()) labels[c] += '+';
    labels[c] += fine.labels()[static_cast<std::size_t>(i)];
  }
  return FiniteMeasureSpace(std::move(labels), std::move(masses));
}

Coarsening Coarsening::then(const Coarsening& next) const {
  if (next.fine_count() != coarse_count_) throw ValidationError("Coarsening::then: incompatible coarsenings");
  std::vector<Eigen::Index> map(map_.size());
  for (std::size_t i = 0; i < map_.size(); ++i) map[i] = next(map_[i]);
  return Coarsening(std::move(map), next.coarse_count());
}

void StepFunction::validate() const {
  if (values.rows() != row_space.size() || values.cols() != col_space.size()) {
    throw DimensionError("step function: value matrix does not match the cell counts");
  }
  if (!all_finite(values)) throw ValidationError("step function: values must be finite");
}

ComplexMatrix kernel_operator_matrix(const StepKernel& k) {
  k.validate();
  return k.row_space.masses().cwiseSqrt().asDiagonal() * k.values * k.col_space.masses().cwiseSqrt().asDiagonal();
}

double kernel_operator_norm(const StepKernel& k) {
  const ComplexMatrix c = kernel_operator_matrix(k);
  if (c.size() == 0) return 0.0;
  return operator_norm(c);
}

MultiplierNormResult step_multiplier_norm(const StepSymbol& phi, double rel_tol, const NormOptions& options) {
  phi.validate();
  return multiplier_norm(phi.values, rel_tol, options);
}

ComplexMatrix conditional_expectation(const ComplexMatrix& values, const RealVector& row_masses,
                                      const RealVector& col_masses, const Coarsening& rows,
                                      const Coarsening& cols) {
  if (values.rows() != row_masses.size() || values.cols() != col_masses.size()) {
    throw DimensionError("conditional_expectation: masses do not match the value matrix");
  }
  require_matches(rows, values.rows(), "conditional_expectation");
  require_matches(cols, values.cols(), "conditional_expectation");
  require_positive_masses(row_masses, "conditional_expectation");
  require_positive_masses(col_masses, "conditional_expectation");

  ComplexMatrix sums = ComplexMatrix::Zero(rows.coarse_count(), cols.coarse_count());
  RealVector row_total = RealVector::Zero(rows.coarse_count());
  RealVector col_total = RealVector::Zero(cols.coarse_count());
  for (Eigen::Index j = 0; j < values.rows(); ++j) row_total(rows(j)) += row_masses(j);
  for (Eigen::Index k = 0; k < values.cols(); ++k) col_total(cols(k)) += col_masses(k);
  Eigen::MatrixXi count = Eigen::MatrixXi::Zero(rows.coarse_count(), cols.coarse_count());
  for (Eigen::Index j = 0; j < values.rows(); ++j) {
    for (Eigen::Index k = 0; k < values.cols(); ++k) {
      sums(rows(j), cols(k)) += row_masses(j) * col_masses(k) * values(j, k);
      ++count(rows(j), cols(k));
    }
  }
  ComplexMatrix out = row_total.cwiseInverse().asDiagonal() * sums * col_total.cwiseInverse().asDiagonal();
  // Single-cell products are copied so unmerged values stay bit-identical.
  for (Eigen::Index j = 0; j < values.rows(); ++j)
    for (Eigen::Index k = 0; k < values.cols(); ++k)
      if (count(rows(j), cols(k)) == 1) out(rows(j), cols(k)) = values(j, k);
  return out;
}

ComplexMatrix lift(const ComplexMatrix& coarse, const Coarsening& rows, const Coarsening& cols) {
  if (coarse.rows() != rows.coarse_count() || coarse.cols() != cols.coarse_count()) {
    throw DimensionError("lift: coarse matrix does not match the coarsenings");
  }
  ComplexMatrix fine(rows.fine_count(), cols.fine_count());
  for (Eigen::Index j = 0; j < fine.rows(); ++j)
    for (Eigen::Index k = 0; k < fine.cols(); ++k) fine(j, k) = coarse(rows(j), cols(k));
  return fine;
}

double weighted_l2_norm(const ComplexMatrix& f, const RealVector& row_masses, const RealVector& col_masses) {
  if (f.rows() != row_masses.size() || f.cols() != col_masses.size()) {
    throw DimensionError("weighted_l2_norm: masses do not match the matrix");
  }
  return std::sqrt((row_masses.transpose() * f.cwiseAbs2() * col_masses)(0, 0));
}

ContractionReport projection_contracts_operator_norm(const StepKernel& k, const Coarsening& rows,
                                                     const Coarsening& cols) {
  ContractionReport report;
  report.fine = kernel_operator_norm(k);
  report.coarse = kernel_operator_norm(conditional_expectation(k, rows, cols));
  report.holds = report.coarse <= report.fine * (1.0 + 1e-10) + std::numeric_limits<double>::min();
  return report;
}

ContractionReport projection_contracts_multiplier_norm(const StepSymbol& phi, const Coarsening& rows,
                                                       const Coarsening& cols, double rel_tol,
                                                       const NormOptions& options) {
  ContractionReport report;
  report.fine = step_multiplier_norm(phi, rel_tol, options).upper;
  report.coarse = step_multiplier_norm(conditional_expectation(phi, rows, cols), rel_tol, options).upper;
  report.holds = report.coarse <= report.fine * (1.0 + 3.0 * rel_tol);
  return report;
}

namespace {

StepFunction rescale_spaces(const StepFunction& f, const RealVector& xi, const RealVector& eta) {
  f.validate();
  if (xi.size() != f.row_space.size() || eta.size() != f.col_space.size()) {
    throw DimensionError("density_rescale: one density value per cell");
  }
  require_positive_masses(xi, "density_rescale");
  require_positive_masses(eta, "density_rescale");
  StepFunction out;
  out.row_space = FiniteMeasureSpace(f.row_space.labels(), f.row_space.masses().cwiseProduct(xi));
  out.col_space = FiniteMeasureSpace(f.col_space.labels(), f.col_space.masses().cwiseProduct(eta));
  out.values = f.values;
  return out;
}

}  // namespace

StepKernel density_rescale(const StepKernel& k, const RealVector& xi, const RealVector& eta) {
  StepKernel out;
  static_cast<StepFunction&>(out) = rescale_spaces(k, xi, eta);
  out.values = xi.cwiseSqrt().cwiseInverse().asDiagonal() * k.values * eta.cwiseSqrt().cwiseInverse().asDiagonal();
  return out;
}

StepSymbol density_rescale(const StepSymbol& phi, const RealVector& xi, const RealVector& eta) {
  StepSymbol out;
  static_cast<StepFunction&>(out) = rescale_spaces(phi, xi, eta);
  return out;
}

namespace {

// Merge coarse cell b into a (a < b); cells above b shift down by one.
Coarsening merge_cells(const Coarsening& c, Eigen::Index a, Eigen::Index b) {
  std::vector<Eigen::Index> map = c.map();
  for (auto& target : map) {
    if (target == b) {
      target = a;
    } else if (target > b) {
      --target;
    }
  }
  return Coarsening(std::move(map), c.coarse_count() - 1);
}

double projection_error(const StepSymbol& fine, const Coarsening& rows, const Coarsening& cols) {
  const RealVector& mu = fine.row_space.masses();
  const RealVector& nu = fine.col_space.masses();
  const ComplexMatrix coarse = conditional_expectation(fine.values, mu, nu, rows, cols);
  return weighted_l2_norm(fine.values - lift(coarse, rows, cols), mu, nu);
}

}  // namespace

SymbolApproximation approximate_symbol(const StepSymbol& fine, double epsilon, double rel_tol,
                                       const NormOptions& options) {
  fine.validate();
  if (!(epsilon > 0.0)) throw ValidationError("approximate_symbol: epsilon must be positive");

  SymbolApproximation out;
  out.rows = Coarsening::identity(fine.row_space.size());
  out.cols = Coarsening::identity(fine.col_space.size());

  for (;;) {
    double best = std::numeric_limits<double>::infinity();
    bool best_is_row = true;
    Eigen::Index best_a = -1;
    Eigen::Index best_b = -1;
    auto consider = [&](bool is_row, Eigen::Index count) {
      for (Eigen::Index a = 0; a < count; ++a) {
        for (Eigen::Index b = a + 1; b < count; ++b) {
          const double err = is_row ? projection_error(fine, merge_cells(out.rows, a, b), out.cols)
                                    : projection_error(fine, out.rows, merge_cells(out.cols, a, b));
          if (err < best) {
            best = err;
            best_is_row = is_row;
            best_a = a;
            best_b = b;
          }
        }
      }
    };
    consider(true, out.rows.coarse_count());
    consider(false, out.cols.coarse_count());
    if (best_a < 0 || !(best < epsilon)) break;
    if (best_is_row) {
      out.rows = merge_cells(out.rows, best_a, best_b);
    } else {
      out.cols = merge_cells(out.cols, best_a, best_b);
    }
    out.l2_error = best;
    ++out.merges;
  }

  out.coarse = conditional_expectation(fine, out.rows, out.cols);
  out.norms.fine = step_multiplier_norm(fine, rel_tol, options).upper;
  out.norms.coarse = step_multiplier_norm(out.coarse, rel_tol, options).upper;
  out.norms.holds = out.norms.coarse <= out.norms.fine * (1.0 + 3.0 * rel_tol);
  return out;
}

}  // namespace shm
