#include "shm/schur.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "random.hpp"

namespace shm {

namespace {

constexpr double kSupportThreshold = 1e-7;
constexpr double kRankThreshold = 1e-12;
constexpr double kWitnessTolerance = 1e-8;
constexpr double kPsdThreshold = 1e-9;
constexpr int kMaxCompletionDepth = 6;

void require_nonempty(const ComplexMatrix& a, const char* op) {
  if (a.rows() == 0 || a.cols() == 0) throw DimensionError(std::string(op) + ": empty matrix");
}

RealVector row_norms(const ComplexMatrix& a) {
  RealVector out(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) out(i) = a.row(i).norm();
  return out;
}

double max_row_norm(const ComplexMatrix& a) { return a.rows() == 0 || a.cols() == 0 ? 0.0 : row_norms(a).maxCoeff(); }

double spectral_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return Eigen::JacobiSVD<ComplexMatrix>(a).singularValues()(0);
}

RealVector uniform_unit(Eigen::Index n) { return RealVector::Constant(n, 1.0 / std::sqrt(double(n))); }

// Conjugated polar factor: the contraction B maximizing Re sum_st M_st B_st.
ComplexMatrix conj_polar(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return (svd.matrixU() * svd.matrixV().adjoint()).conjugate();
}

double refine_contraction(const ComplexMatrix& phi, ComplexMatrix& b, int steps) {
  Eigen::JacobiSVD<ComplexMatrix> svd(schur_product(phi, b), Eigen::ComputeThinU | Eigen::ComputeThinV);
  double value = svd.singularValues()(0);
  for (int k = 0; k < steps; ++k) {
    const ComplexVector a = svd.matrixU().col(0);
    const ComplexVector c = svd.matrixV().col(0);
    // M_st = conj(a_s) Phi_st c_t
    const ComplexMatrix m = a.conjugate().asDiagonal() * phi * c.asDiagonal();
    ComplexMatrix next = conj_polar(m);
    Eigen::JacobiSVD<ComplexMatrix> next_svd(schur_product(phi, next), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double next_value = next_svd.singularValues()(0);
    if (!(next_value > value * (1.0 + 1e-14))) break;
    b = std::move(next);
    svd = std::move(next_svd);
    value = next_value;
  }
  return value;
}

}  // namespace

ComplexMatrix HaagerupFactorization::reconstruct() const { return X * Y.adjoint(); }

double HaagerupFactorization::residual(const ComplexMatrix& phi) const {
  if (phi.rows() != X.rows() || phi.cols() != Y.rows()) {
    throw DimensionError("HaagerupFactorization::residual: shape mismatch");
  }
  if (X.cols() == 0) return max_abs_entry(phi);
  return max_abs_entry((phi - reconstruct()).eval());
}

double factorization_bound(const ComplexMatrix& X, const ComplexMatrix& Y) {
  return max_row_norm(X) * max_row_norm(Y);
}

void balance(HaagerupFactorization& f) {
  const double bx = max_row_norm(f.X);
  const double by = max_row_norm(f.Y);
  if (bx > 0.0 && by > 0.0) {
    const double a = std::sqrt(by / bx);
    f.X *= a;
    f.Y /= a;
  }
  f.bound = factorization_bound(f.X, f.Y);
}

ComplexMatrix PsdBlockCertificate::block(const ComplexMatrix& phi) const {
  const Eigen::Index m = R.rows();
  const Eigen::Index n = S.rows();
  if (phi.rows() != m || phi.cols() != n || R.cols() != m || S.cols() != n) {
    throw DimensionError("PsdBlockCertificate: shape mismatch with symbol");
  }
  ComplexMatrix out(m + n, m + n);
  out.topLeftCorner(m, m) = R;
  out.topRightCorner(m, n) = phi;
  out.bottomLeftCorner(n, m) = phi.adjoint();
  out.bottomRightCorner(n, n) = S;
  return out;
}

double PsdBlockCertificate::min_eigenvalue(const ComplexMatrix& phi) const {
  return shm::min_eigenvalue(block(phi));
}

double PsdBlockCertificate::max_diagonal() const {
  double out = 0.0;
  if (R.size() > 0) out = std::max(out, R.diagonal().real().maxCoeff());
  if (S.size() > 0) out = std::max(out, S.diagonal().real().maxCoeff());
  return out;
}

bool PsdBlockCertificate::valid_for(const ComplexMatrix& phi) const {
  if (phi.rows() != R.rows() || phi.cols() != S.rows()) return false;
  if (level == 0.0) return max_abs_entry(phi) == 0.0;
  return min_eigenvalue(phi) >= -kPsdThreshold * level && max_diagonal() <= level * (1.0 + kPsdThreshold);
}

PsdBlockCertificate certificate_from_factorization(const HaagerupFactorization& f) {
  HaagerupFactorization b = f;
  balance(b);
  PsdBlockCertificate cert;
  cert.R = b.X * b.X.adjoint();
  cert.S = b.Y * b.Y.adjoint();
  cert.level = b.bound;
  return cert;
}

ComplexMatrix schur_product(const ComplexMatrix& phi, const ComplexMatrix& a) {
  if (phi.rows() != a.rows() || phi.cols() != a.cols()) {
    throw DimensionError("schur_product: shapes " + std::to_string(phi.rows()) + "x" +
                         std::to_string(phi.cols()) + " and " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " differ");
  }
  return phi.cwiseProduct(a);
}

LowerBound multiplier_lower_bound(const ComplexMatrix& phi, int trials, std::uint64_t seed) {
  require_nonempty(phi, "multiplier_lower_bound");
  if (trials < 1) throw ValidationError("multiplier_lower_bound: trials must be >= 1");
  constexpr int kRefineSteps = 30;
  const Eigen::Index m = phi.rows();
  const Eigen::Index n = phi.cols();

  LowerBound best;
  best.witness = ComplexMatrix::Identity(m, n);
  best.value = refine_contraction(phi, best.witness, kRefineSteps);

  auto consider = [&](ComplexMatrix b) {
    const double value = refine_contraction(phi, b, kRefineSteps);
    if (value > best.value) {
      best.value = value;
      best.witness = std::move(b);
    }
  };

  // Coordinate matrices: |Phi o e_s e_t^T| = |Phi_st|; only the best is refined.
  Eigen::Index s = 0;
  Eigen::Index t = 0;
  phi.cwiseAbs().maxCoeff(&s, &t);
  ComplexMatrix coord = ComplexMatrix::Zero(m, n);
  coord(s, t) = 1.0;
  consider(std::move(coord));

  for (int i = 0; i < trials; ++i) {
    auto rng = detail::make_rng(seed, static_cast<std::uint64_t>(i));
    if (i % 2 == 0) {
      const ComplexVector u = detail::unit_gaussian_vector(rng, m);
      const ComplexVector v = detail::unit_gaussian_vector(rng, n);
      consider(u * v.adjoint());
    } else {
      consider(detail::random_isometry(rng, m, n));
    }
  }
  return best;
}

DualPoint dual_ascent(const ComplexMatrix& phi, RealVector u, RealVector v, int max_iterations) {
  require_nonempty(phi, "dual_ascent");
  if (u.size() != phi.rows() || v.size() != phi.cols()) throw DimensionError("dual_ascent: start shape");
  DualPoint best{u, v, -1.0, 0};
  for (int it = 0; it < max_iterations; ++it) {
    const ComplexMatrix a = u.asDiagonal() * phi * v.asDiagonal();
    Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& sigma = svd.singularValues();
    const double f = sigma.sum();
    best.iterations = it + 1;
    if (f > best.value) {
      best.value = f;
      best.u = u;
      best.v = v;
    }
    if (f <= 0.0) break;
    // Stationarity: u_s^2 = (W Sigma W^*)_ss / f, v_t^2 = (Z Sigma Z^*)_tt / f.
    const RealVector un = ((svd.matrixU().cwiseAbs2() * sigma) / f).cwiseMax(0.0).cwiseSqrt();
    const RealVector vn = ((svd.matrixV().cwiseAbs2() * sigma) / f).cwiseMax(0.0).cwiseSqrt();
    const double change = (un - u).cwiseAbs().maxCoeff() + (vn - v).cwiseAbs().maxCoeff();
    u = un / un.norm();
    v = vn / vn.norm();
    if (change < 1e-13) break;
  }
  best.value = std::max(best.value, 0.0);
  return best;
}

ComplexMatrix contraction_from_dual(const ComplexMatrix& phi, const DualPoint& point) {
  const ComplexMatrix a = point.u.asDiagonal() * phi * point.v.asDiagonal();
  return conj_polar(a);
}

namespace {

std::optional<HaagerupFactorization> recover(const ComplexMatrix& phi, const DualPoint& point, int depth) {
  const Eigen::Index m = phi.rows();
  const Eigen::Index n = phi.cols();
  const double scale = max_abs_entry(phi);
  if (scale == 0.0) return HaagerupFactorization{ComplexMatrix(m, 0), ComplexMatrix(n, 0), 0.0};
  if (depth > kMaxCompletionDepth) return std::nullopt;

  RealVector u = point.u;
  RealVector v = point.v;
  const double umax = u.maxCoeff();
  const double vmax = v.maxCoeff();
  for (Eigen::Index i = 0; i < m; ++i) if (u(i) < kSupportThreshold * umax) u(i) = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) if (v(j) < kSupportThreshold * vmax) v(j) = 0.0;

  const ComplexMatrix a = u.asDiagonal() * phi * v.asDiagonal();
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sigma = svd.singularValues();
  if (sigma.size() == 0 || sigma(0) <= 0.0) return std::nullopt;
  Eigen::Index r = 0;
  while (r < sigma.size() && sigma(r) > kRankThreshold * sigma(0)) ++r;

  const RealVector inv_sqrt = sigma.head(r).cwiseSqrt().cwiseInverse();
  HaagerupFactorization f;
  f.X = phi * v.asDiagonal() * svd.matrixV().leftCols(r) * inv_sqrt.asDiagonal();
  f.Y = phi.adjoint() * u.asDiagonal() * svd.matrixU().leftCols(r) * inv_sqrt.asDiagonal();
  balance(f);

  const ComplexMatrix residual = phi - f.reconstruct();
  const double done = 1e-11 * (1.0 + scale);
  if (max_abs_entry(residual) <= done) return f;

  // Complete the block the dual support does not see, using the slack left
  // in each row norm: x_s <- [x_s, a_s x'_s] with |x'_s| <= 1.
  const double level = f.bound;
  std::vector<Eigen::Index> rows;
  std::vector<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < m; ++i) if (residual.row(i).cwiseAbs().maxCoeff() > done) rows.push_back(i);
  for (Eigen::Index j = 0; j < n; ++j) if (residual.col(j).cwiseAbs().maxCoeff() > done) cols.push_back(j);

  const RealVector xn = row_norms(f.X);
  const RealVector yn = row_norms(f.Y);
  RealVector slack_rows(static_cast<Eigen::Index>(rows.size()));
  RealVector slack_cols(static_cast<Eigen::Index>(cols.size()));
  const double min_slack = 1e-7 * std::sqrt(level);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    slack_rows(Eigen::Index(i)) = std::sqrt(std::max(level - xn(rows[i]) * xn(rows[i]), 0.0));
    if (slack_rows(Eigen::Index(i)) <= min_slack) return std::nullopt;
  }
  for (std::size_t j = 0; j < cols.size(); ++j) {
    slack_cols(Eigen::Index(j)) = std::sqrt(std::max(level - yn(cols[j]) * yn(cols[j]), 0.0));
    if (slack_cols(Eigen::Index(j)) <= min_slack) return std::nullopt;
  }

  ComplexMatrix sub(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      sub(Eigen::Index(i), Eigen::Index(j)) = residual(rows[i], cols[j]) /
                                              (slack_rows(Eigen::Index(i)) * slack_cols(Eigen::Index(j)));
    }
  }
  const DualPoint sub_point = dual_ascent(sub, uniform_unit(sub.rows()), uniform_unit(sub.cols()));
  auto completion = recover(sub, sub_point, depth + 1);
  if (!completion) return std::nullopt;

  const Eigen::Index d0 = f.X.cols();
  const Eigen::Index d1 = completion->X.cols();
  HaagerupFactorization out;
  out.X = ComplexMatrix::Zero(m, d0 + d1);
  out.Y = ComplexMatrix::Zero(n, d0 + d1);
  out.X.leftCols(d0) = f.X;
  out.Y.leftCols(d0) = f.Y;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.X.row(rows[i]).tail(d1) = slack_rows(Eigen::Index(i)) * completion->X.row(Eigen::Index(i));
  }
  for (std::size_t j = 0; j < cols.size(); ++j) {
    out.Y.row(cols[j]).tail(d1) = slack_cols(Eigen::Index(j)) * completion->Y.row(Eigen::Index(j));
  }
  balance(out);
  return out;
}

}  // namespace

std::optional<HaagerupFactorization> factorization_from_dual(const ComplexMatrix& phi, const DualPoint& point) {
  require_nonempty(phi, "factorization_from_dual");
  auto f = recover(phi, point, 0);
  if (f && f->residual(phi) > kWitnessTolerance * (1.0 + f->bound)) return std::nullopt;
  return f;
}

namespace {

// Projection onto {off-diagonal block = phi, real diagonal <= level}.
void project_affine(ComplexMatrix& m, const ComplexMatrix& phi, double level) {
  const Eigen::Index r = phi.rows();
  const Eigen::Index c = phi.cols();
  m.topRightCorner(r, c) = phi;
  m.bottomLeftCorner(c, r) = phi.adjoint();
  for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, i) = Complex(std::min(m(i, i).real(), level), 0.0);
}

ComplexMatrix project_psd_unchecked(const ComplexMatrix& m) {
  const ComplexMatrix sym = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(sym);
  const RealVector clamped = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().adjoint();
}

PsdBlockCertificate certificate_from_iterate(const ComplexMatrix& x, Eigen::Index m, Eigen::Index n,
                                             double shift, double level) {
  PsdBlockCertificate cert;
  cert.R = x.topLeftCorner(m, m) + shift * ComplexMatrix::Identity(m, m);
  cert.S = x.bottomRightCorner(n, n) + shift * ComplexMatrix::Identity(n, n);
  cert.R = (cert.R + cert.R.adjoint()).eval() / 2.0;
  cert.S = (cert.S + cert.S.adjoint()).eval() / 2.0;
  cert.level = level;
  return cert;
}

}  // namespace

FeasibilityResult psd_feasibility(const ComplexMatrix& phi, double level, double tol,
                                  const FeasibilityOptions& options) {
  require_nonempty(phi, "psd_feasibility");
  if (!(level > 0.0)) throw ValidationError("psd_feasibility: level must be positive");
  if (!(tol > 0.0)) throw ValidationError("psd_feasibility: tol must be positive");
  const Eigen::Index m = phi.rows();
  const Eigen::Index n = phi.cols();
  const Eigen::Index dim = m + n;

  ComplexMatrix x;
  if (options.warm_start) {
    if (options.warm_start->rows() != dim || options.warm_start->cols() != dim) {
      throw DimensionError("psd_feasibility: warm start has the wrong shape");
    }
    x = (*options.warm_start + options.warm_start->adjoint()) / 2.0;
  } else {
    x = level * ComplexMatrix::Identity(dim, dim);
  }
  project_affine(x, phi, level);

  FeasibilityResult result;
  result.best_repaired_level = std::numeric_limits<double>::infinity();
  ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
  ComplexMatrix q = ComplexMatrix::Zero(dim, dim);
  const int check_every = std::max(1, options.check_every);
  double previous_gap = -1.0;

  for (int k = 1; k <= options.max_iterations; ++k) {
    const ComplexMatrix y = project_psd_unchecked(x + p);
    p = x + p - y;
    ComplexMatrix next = y + q;
    project_affine(next, phi, level);
    q = y + q - next;
    x = std::move(next);
    result.iterations = k;
    result.gap = (y - x).norm();

    if (k % check_every != 0 && k != options.max_iterations) continue;
    const double lambda = shm::min_eigenvalue(x);
    if (lambda >= -kPsdThreshold * level) {
      result.status = FeasibilityStatus::Feasible;
      result.certificate = certificate_from_iterate(x, m, n, 0.0, level);
      result.best_repaired_level = level;
      result.best_repaired = result.certificate;
      result.last_iterate = x;
      return result;
    }
    const double repaired = level - lambda;
    if (repaired < result.best_repaired_level) {
      result.best_repaired_level = repaired;
      result.best_repaired = certificate_from_iterate(x, m, n, -lambda, repaired);
    }
    // The iterates have settled at a positive distance between the sets.
    if (previous_gap >= 0.0 && result.gap > tol * (1.0 + level) &&
        std::abs(result.gap - previous_gap) <= 1e-7 * previous_gap) {
      result.status = FeasibilityStatus::Infeasible;
      result.last_iterate = x;
      return result;
    }
    previous_gap = result.gap;
  }
  result.status = FeasibilityStatus::Indeterminate;
  result.last_iterate = x;
  return result;
}

HaagerupFactorization haagerup_factorize(const PsdBlockCertificate& cert, const ComplexMatrix& phi) {
  require_nonempty(phi, "haagerup_factorize");
  const Eigen::Index m = phi.rows();
  const Eigen::Index n = phi.cols();
  if (cert.R.rows() != m || cert.R.cols() != m || cert.S.rows() != n || cert.S.cols() != n) {
    throw DimensionError("haagerup_factorize: certificate shape does not match the symbol");
  }
  if (!cert.valid_for(phi)) {
    throw ValidationError("haagerup_factorize: certificate is not valid for this symbol");
  }
  HaagerupFactorization f;
  if (cert.level == 0.0) {
    f.X = ComplexMatrix(m, 0);
    f.Y = ComplexMatrix(n, 0);
    return f;
  }
  const ComplexMatrix block = cert.block(phi);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig((block + block.adjoint()) / 2.0);
  // Eigenvalues at rounding level are zero; without this a rank-one block
  // picks up spurious columns of norm ~1e-8.
  const double floor = 1e-13 * static_cast<double>(m + n) * std::max(eig.eigenvalues().maxCoeff(), 0.0);
  const RealVector lambda = (eig.eigenvalues().array() > floor).select(eig.eigenvalues(), 0.0);
  const ComplexMatrix g_full = eig.eigenvectors() * lambda.cwiseSqrt().asDiagonal();

  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = g_full.cols() - 1; j >= 0; --j) {
    if (g_full.col(j).norm() > 1e-10) keep.push_back(j);
  }
  ComplexMatrix g(m + n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    ComplexVector col = g_full.col(keep[k]);
    // Fix the phase: first entry of significant size becomes real positive.
    Eigen::Index lead = 0;
    col.cwiseAbs().maxCoeff(&lead);
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col(i)) > 1e-8 * std::abs(col(lead))) {
        lead = i;
        break;
      }
    }
    col *= std::conj(col(lead)) / std::abs(col(lead));
    g.col(Eigen::Index(k)) = col;
  }
  f.X = g.topRows(m);
  f.Y = g.bottomRows(n);
  f.bound = factorization_bound(f.X, f.Y);
  return f;
}

ProjectiveCertificate projective_certificate(const ComplexMatrix& phi_rows, const ComplexMatrix& psi_rows) {
  if (phi_rows.rows() != psi_rows.rows()) {
    throw DimensionError("projective_certificate: " + std::to_string(phi_rows.rows()) + " functions on S but " +
                         std::to_string(psi_rows.rows()) + " on T");
  }
  ProjectiveCertificate out;
  out.represented = ComplexMatrix::Zero(phi_rows.cols(), psi_rows.cols());
  for (Eigen::Index k = 0; k < phi_rows.rows(); ++k) {
    const double a = phi_rows.cols() > 0 ? phi_rows.row(k).cwiseAbs().maxCoeff() : 0.0;
    const double b = psi_rows.cols() > 0 ? psi_rows.row(k).cwiseAbs().maxCoeff() : 0.0;
    out.value += a * b;
  }
  out.represented = phi_rows.transpose() * psi_rows;
  return out;
}

MultiplierNormResult multiplier_norm(const ComplexMatrix& phi, double rel_tol, const NormOptions& options) {
  require_nonempty(phi, "multiplier_norm");
  if (!(rel_tol > 0.0 && rel_tol <= 0.1)) throw ValidationError("multiplier_norm: rel_tol must lie in (0, 0.1]");
  if (!phi.allFinite()) throw ValidationError("multiplier_norm: non-finite entries");
  const Eigen::Index m = phi.rows();
  const Eigen::Index n = phi.cols();

  MultiplierNormResult result;
  if (max_abs_entry(phi) == 0.0) {
    result.witness = HaagerupFactorization{ComplexMatrix(m, 0), ComplexMatrix(n, 0), 0.0};
    result.certificate = PsdBlockCertificate{ComplexMatrix::Zero(m, m), ComplexMatrix::Zero(n, n), 0.0};
    result.lower_witness = ComplexMatrix::Identity(m, n);
    result.converged = true;
    return result;
  }

  auto consider_lower = [&](double value, ComplexMatrix b) {
    if (value > result.lower) {
      result.lower = value;
      result.lower_witness = std::move(b);
    }
  };
  auto consider_upper = [&](HaagerupFactorization f, const PsdBlockCertificate* cert = nullptr) {
    balance(f);
    if (f.residual(phi) > kWitnessTolerance * (1.0 + f.bound)) return;
    if (result.witness.X.rows() == 0 || f.bound < result.upper) {
      result.upper = f.bound;
      result.certificate = certificate_from_factorization(f);
      if (cert && !result.certificate.valid_for(phi)) {
        result.certificate = *cert;
        result.certificate.level = std::max(cert->level, f.bound);
      }
      result.witness = std::move(f);
    }
  };
  auto bracket_closed = [&] { return result.upper - result.lower <= rel_tol * result.upper; };

  // Trivial factorizations Phi = Phi * I and Phi = I * Phi.
  consider_upper({phi, ComplexMatrix::Identity(n, n), 0.0});
  consider_upper({ComplexMatrix::Identity(m, m), phi.adjoint(), 0.0});
  // Balanced singular split, exact for positive semidefinite Phi.
  {
    Eigen::JacobiSVD<ComplexMatrix> svd(phi, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& sigma = svd.singularValues();
    const Eigen::Index rank = std::max<Eigen::Index>(1, (sigma.array() > kRankThreshold * sigma(0)).count());
    const RealVector root = sigma.head(rank).cwiseSqrt();
    consider_upper({svd.matrixU().leftCols(rank) * root.asDiagonal(), svd.matrixV().leftCols(rank) * root.asDiagonal(), 0.0});
  }

  for (int start = 0; start < std::max(1, options.dual_starts); ++start) {
    RealVector u = uniform_unit(m);
    RealVector v = uniform_unit(n);
    if (start > 0) {
      auto rng = detail::make_rng(options.seed, 0x10000u + static_cast<std::uint64_t>(start));
      u = detail::gaussian_vector(rng, m).cwiseAbs() + RealVector::Constant(m, 1e-3);
      v = detail::gaussian_vector(rng, n).cwiseAbs() + RealVector::Constant(n, 1e-3);
      u.normalize();
      v.normalize();
    }
    const DualPoint point = dual_ascent(phi, u, v);
    result.iterations += point.iterations;
    ComplexMatrix b = contraction_from_dual(phi, point);
    const double value = spectral_norm(schur_product(phi, b));
    consider_lower(value, std::move(b));
    if (auto f = factorization_from_dual(phi, point)) consider_upper(std::move(*f));
    if (bracket_closed()) break;
  }

  if (!bracket_closed()) {
    const LowerBound sampled = multiplier_lower_bound(phi, options.lower_bound_trials, options.seed);
    consider_lower(sampled.value, sampled.witness);
  }

  // Bisection over PSD feasibility for whatever gap remains.
  double search_lo = result.lower;
  std::optional<ComplexMatrix> warm;
  {
    const PsdBlockCertificate c = certificate_from_factorization(result.witness);
    warm = c.block(phi);
  }
  for (int step = 0; step < options.max_bisection_steps && !bracket_closed(); ++step) {
    if (result.upper - search_lo <= 1e-3 * rel_tol * result.upper) break;
    const double mid = 0.5 * (search_lo + result.upper);
    FeasibilityOptions fopt;
    fopt.max_iterations = options.feasibility_budget;
    fopt.warm_start = warm;
    const FeasibilityResult fr = psd_feasibility(phi, mid, 1e-9, fopt);
    result.iterations += fr.iterations;
    warm = fr.last_iterate;

    const PsdBlockCertificate* cert = fr.certificate ? &*fr.certificate : nullptr;
    if (!cert && fr.best_repaired && fr.best_repaired_level < result.upper) cert = &*fr.best_repaired;
    if (cert && cert->valid_for(phi)) consider_upper(haagerup_factorize(*cert, phi), cert);
    if (fr.status == FeasibilityStatus::Feasible) continue;

    search_lo = mid;
    // The negative part of the last iterate points at a separating dual
    // direction; its diagonal seeds another dual ascent.
    const ComplexMatrix neg = project_psd_unchecked(-fr.last_iterate);
    RealVector u = neg.topLeftCorner(m, m).diagonal().real().cwiseMax(0.0).cwiseSqrt();
    RealVector v = neg.bottomRightCorner(n, n).diagonal().real().cwiseMax(0.0).cwiseSqrt();
    u += RealVector::Constant(m, 1e-3 * (u.maxCoeff() + 1e-300));
    v += RealVector::Constant(n, 1e-3 * (v.maxCoeff() + 1e-300));
    u.normalize();
    v.normalize();
    const DualPoint point = dual_ascent(phi, u, v);
    result.iterations += point.iterations;
    ComplexMatrix b = contraction_from_dual(phi, point);
    const double value = spectral_norm(schur_product(phi, b));
    consider_lower(value, std::move(b));
    if (auto f = factorization_from_dual(phi, point)) consider_upper(std::move(*f));
  }

  result.lower = std::min(result.lower, result.upper);
  result.converged = bracket_closed();
  return result;
}

}  // namespace shm
