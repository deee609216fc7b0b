#pragma once

// Dense complex linear algebra shared by every other module: Schatten norms,
// Hermitian eigensystems and the projection onto the PSD cone.

#include <complex>
#include <string>

#include <Eigen/Dense>

#include "shm/errors.hpp"

namespace shm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues ascending, the
/// eigenvectors are the columns of a unitary matrix.
template <typename Scalar>
struct HermitianEigensystem {
  Eigen::Matrix<typename Eigen::NumTraits<Scalar>::Real, Eigen::Dynamic, 1> eigenvalues;
  DenseMatrix<Scalar> eigenvectors;
};

namespace detail {

template <typename Derived>
void require_nonempty(const Eigen::MatrixBase<Derived>& a, const char* op) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw DimensionError(std::string(op) + ": empty matrix");
  }
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& a, const char* op) {
  require_nonempty(a, op);
  if (a.rows() != a.cols()) {
    throw DimensionError(std::string(op) + ": matrix is " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ", expected square");
  }
}

template <typename Derived>
auto singular_values(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  return Eigen::JacobiSVD<DenseMatrix<Scalar>>(a.eval()).singularValues().eval();
}

}  // namespace detail

/// Largest singular value.
template <typename Derived>
typename Derived::RealScalar operator_norm(const Eigen::MatrixBase<Derived>& a) {
  detail::require_nonempty(a, "operator_norm");
  return detail::singular_values(a)(0);
}

/// Sum of singular values (S1 norm).
template <typename Derived>
typename Derived::RealScalar trace_norm(const Eigen::MatrixBase<Derived>& a) {
  detail::require_nonempty(a, "trace_norm");
  return detail::singular_values(a).sum();
}

/// Frobenius norm (S2 norm).
template <typename Derived>
typename Derived::RealScalar hilbert_schmidt_norm(const Eigen::MatrixBase<Derived>& a) {
  detail::require_nonempty(a, "hilbert_schmidt_norm");
  return a.norm();
}

/// Hermiticity defect relative to the operator norm; 0 for the zero matrix.
template <typename Derived>
typename Derived::RealScalar hermitian_defect(const Eigen::MatrixBase<Derived>& a) {
  using Real = typename Derived::RealScalar;
  detail::require_square(a, "hermitian_defect");
  const Real scale = operator_norm(a);
  const Real defect = operator_norm((a - a.adjoint()).eval());
  return scale > Real(0) ? defect / scale : defect;
}

inline constexpr double kHermitianTolerance = 1e-10;

template <typename Derived>
void require_hermitian(const Eigen::MatrixBase<Derived>& a, const char* op) {
  detail::require_square(a, op);
  if (hermitian_defect(a) > kHermitianTolerance) {
    throw ValidationError(std::string(op) + ": matrix is not Hermitian");
  }
}

template <typename Derived>
HermitianEigensystem<typename Derived::Scalar> hermitian_eig(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  require_hermitian(a, "hermitian_eig");
  // Symmetrize so the solver sees an exactly Hermitian input.
  const DenseMatrix<Scalar> sym = (a + a.adjoint()) / 2;
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw ValidationError("hermitian_eig: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Nearest PSD matrix in Frobenius norm: eigenvalues clamped at zero.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> psd_project(const Eigen::MatrixBase<Derived>& m) {
  const auto eig = hermitian_eig(m);
  const auto clamped = eig.eigenvalues.cwiseMax(0.0);
  DenseMatrix<typename Derived::Scalar> out =
      eig.eigenvectors * clamped.asDiagonal() * eig.eigenvectors.adjoint();
  return (out + out.adjoint()) / 2;
}

/// Smallest eigenvalue of a Hermitian matrix (no Hermiticity validation;
/// the input is symmetrized).
template <typename Derived>
typename Derived::RealScalar min_eigenvalue(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const DenseMatrix<Scalar> sym = (m + m.adjoint()) / 2;
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

/// Largest entry modulus.
template <typename Derived>
typename Derived::RealScalar max_abs_entry(const Eigen::MatrixBase<Derived>& a) {
  return a.size() == 0 ? typename Derived::RealScalar(0) : a.cwiseAbs().maxCoeff();
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& a) {
  return a.allFinite();
}

}  // namespace shm
