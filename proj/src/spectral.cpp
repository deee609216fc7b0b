#include "shm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shm/errors.hpp"

namespace shm {

namespace {

constexpr double kProjectionTolerance = 1e-10;

}  // namespace

FiniteSpectralMeasure::FiniteSpectralMeasure(RealVector points, std::vector<ComplexMatrix> projections)
    : points_(std::move(points)), projections_(std::move(projections)) {
  if (points_.size() == 0) throw DimensionError("FiniteSpectralMeasure: at least one point");
  if (static_cast<Eigen::Index>(projections_.size()) != points_.size()) {
    throw DimensionError("FiniteSpectralMeasure: one projection per point");
  }
  if (!all_finite(points_)) throw ValidationError("FiniteSpectralMeasure: points must be finite");
  for (Eigen::Index i = 0; i < points_.size(); ++i)
    for (Eigen::Index j = i + 1; j < points_.size(); ++j)
      if (points_(i) == points_(j)) throw ValidationError("FiniteSpectralMeasure: points must be distinct");

  const Eigen::Index n = projections_.front().rows();
  ComplexMatrix total = ComplexMatrix::Zero(n, n);
  for (std::size_t j = 0; j < projections_.size(); ++j) {
    const ComplexMatrix& p = projections_[j];
    if (p.rows() != n || p.cols() != n) throw DimensionError("FiniteSpectralMeasure: projections must be n x n");
    if (!all_finite(p)) throw ValidationError("FiniteSpectralMeasure: projection entries must be finite");
    if ((p - p.adjoint()).cwiseAbs().maxCoeff() > kProjectionTolerance ||
        (p * p - p).cwiseAbs().maxCoeff() > kProjectionTolerance) {
      throw ValidationError("FiniteSpectralMeasure: projection " + std::to_string(j) +
                            " is not a Hermitian idempotent");
    }
    for (std::size_t k = j + 1; k < projections_.size(); ++k) {
      if ((p * projections_[k]).cwiseAbs().maxCoeff() > kProjectionTolerance) {
        throw ValidationError("FiniteSpectralMeasure: projections must be mutually orthogonal");
      }
    }
    total += p;
  }
  if ((total - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff() > kProjectionTolerance) {
    throw ValidationError("FiniteSpectralMeasure: projections must sum to the identity");
  }
}

std::vector<Eigen::Index> FiniteSpectralMeasure::ranks() const {
  std::vector<Eigen::Index> out;
  for (const auto& p : projections_) out.push_back(static_cast<Eigen::Index>(std::lround(p.trace().real())));
  return out;
}

ComplexMatrix FiniteSpectralMeasure::apply(const std::function<Complex(double)>& f) const {
  ComplexMatrix out = ComplexMatrix::Zero(dimension(), dimension());
  for (Eigen::Index j = 0; j < size(); ++j) out += f(points_(j)) * projection(j);
  return out;
}

FiniteSpectralMeasure spectral_measure_of_hermitian(const ComplexMatrix& a, double group_tol) {
  if (!(group_tol > 0.0)) throw ValidationError("spectral_measure_of_hermitian: group_tol must be positive");
  const auto es = hermitian_eig(a);
  const Eigen::Index n = a.rows();
  std::vector<double> points;
  std::vector<ComplexMatrix> projections;
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    const bool split = i == n || es.eigenvalues(i) - es.eigenvalues(i - 1) >
                                     group_tol * (1.0 + std::abs(es.eigenvalues(i - 1)));
    if (!split) continue;
    const auto block = es.eigenvectors.middleCols(start, i - start);
    points.push_back(es.eigenvalues.segment(start, i - start).mean());
    projections.emplace_back(block * block.adjoint());
    start = i;
  }
  return FiniteSpectralMeasure(Eigen::Map<RealVector>(points.data(), static_cast<Eigen::Index>(points.size())),
                               std::move(projections));
}

SymbolOnSpectra SymbolOnSpectra::evaluate(const FiniteSpectralMeasure& e1, const FiniteSpectralMeasure& e2,
                                          const std::function<Complex(double, double)>& f) {
  SymbolOnSpectra s;
  s.values.resize(e1.size(), e2.size());
  for (Eigen::Index j = 0; j < e1.size(); ++j)
    for (Eigen::Index k = 0; k < e2.size(); ++k) s.values(j, k) = f(e1.points()(j), e2.points()(k));
  s.validate(e1, e2);
  return s;
}

void SymbolOnSpectra::validate(const FiniteSpectralMeasure& e1, const FiniteSpectralMeasure& e2) const {
  if (values.rows() != e1.size() || values.cols() != e2.size()) {
    throw DimensionError("symbol: value matrix does not match the numbers of spectral points");
  }
  if (!all_finite(values)) throw ValidationError("symbol: values must be finite");
}

ComplexMatrix doi(const SymbolOnSpectra& phi, const FiniteSpectralMeasure& e1, const FiniteSpectralMeasure& e2,
                  const ComplexMatrix& t) {
  phi.validate(e1, e2);
  if (t.rows() != e1.dimension() || t.cols() != e2.dimension()) {
    throw DimensionError("doi: operator does not match the spectral measures");
  }
  std::vector<ComplexMatrix> left;
  left.reserve(static_cast<std::size_t>(e1.size()));
  for (Eigen::Index j = 0; j < e1.size(); ++j) left.emplace_back(e1.projection(j) * t);
  ComplexMatrix out = ComplexMatrix::Zero(t.rows(), t.cols());
  for (Eigen::Index k = 0; k < e2.size(); ++k) {
    ComplexMatrix column = ComplexMatrix::Zero(t.rows(), t.cols());
    for (Eigen::Index j = 0; j < e1.size(); ++j) {
      if (phi.values(j, k) != Complex(0.0)) column += phi.values(j, k) * left[static_cast<std::size_t>(j)];
    }
    out += column * e2.projection(k);
  }
  return out;
}

HsBoundReport doi_hs_bound_check(const SymbolOnSpectra& phi, const FiniteSpectralMeasure& e1,
                                 const FiniteSpectralMeasure& e2, const ComplexMatrix& t) {
  HsBoundReport r;
  r.lhs = hilbert_schmidt_norm(doi(phi, e1, e2, t));
  r.rhs = max_abs_entry(phi.values) * hilbert_schmidt_norm(t);
  r.holds = r.lhs <= r.rhs * (1.0 + 1e-10);
  return r;
}

MultiplierNormResult spectral_multiplier_norm(const SymbolOnSpectra& phi, const FiniteSpectralMeasure& e1,
                                              const FiniteSpectralMeasure& e2, double rel_tol,
                                              const NormOptions& options) {
  phi.validate(e1, e2);
  return multiplier_norm(phi.values, rel_tol, options);
}

OracleEstimate spectral_transformer_oracle(const SymbolOnSpectra& phi, const FiniteSpectralMeasure& e1,
                                           const FiniteSpectralMeasure& e2, int restarts, std::uint64_t seed) {
  phi.validate(e1, e2);
  // Columns of `pieces(E, w)` are P_j w; the image is A Phi B^*.
  const auto pieces = [](const FiniteSpectralMeasure& e, const ComplexVector& w) {
    ComplexMatrix out(e.dimension(), e.size());
    for (Eigen::Index j = 0; j < e.size(); ++j) out.col(j) = e.projection(j) * w;
    return out;
  };
  const auto gather = [](const FiniteSpectralMeasure& e, const ComplexMatrix& w) {
    ComplexVector out = ComplexVector::Zero(e.dimension());
    for (Eigen::Index j = 0; j < e.size(); ++j) out += e.projection(j) * w.col(j);
    return out;
  };
  RankOneTransformer t;
  t.u_dim = e1.dimension();
  t.v_dim = e2.dimension();
  const ComplexMatrix& values = phi.values;
  t.image = [&](const ComplexVector& u, const ComplexVector& v) -> ComplexMatrix {
    return pieces(e1, u) * values * pieces(e2, v).adjoint();
  };
  t.gradient = [&](const ComplexVector& u, const ComplexVector& v, const ComplexMatrix& k) {
    const ComplexMatrix a = pieces(e1, u);
    const ComplexMatrix b = pieces(e2, v);
    return std::pair<ComplexVector, ComplexVector>{gather(e1, k * b * values.adjoint()),
                                                   gather(e2, k.adjoint() * a * values)};
  };
  return maximize_rank_one(t, restarts, seed);
}

IsometryReport verify_isometry(const SymbolOnSpectra& phi, const FiniteSpectralMeasure& e1,
                               const FiniteSpectralMeasure& e2, double rel_tol, int restarts,
                               std::uint64_t seed) {
  IsometryReport r;
  NormOptions options;
  options.seed = seed;
  r.bracket = spectral_multiplier_norm(phi, e1, e2, rel_tol, options);
  r.oracle = spectral_transformer_oracle(phi, e1, e2, restarts, seed);
  r.witness_residual = r.bracket.witness.residual(phi.values);
  const double upper = r.bracket.upper;
  r.oracle_below_upper = r.oracle.value <= upper * (1.0 + 1e-6);
  r.gap_closed = upper - std::max(r.oracle.value, r.bracket.lower) <= rel_tol * upper;
  r.pass = r.oracle_below_upper && r.gap_closed;
  return r;
}

}  // namespace shm
