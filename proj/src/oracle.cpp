#include "shm/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <string>
#include <thread>
#include <vector>

#include "random.hpp"
#include "shm/schur.hpp"

namespace shm {

namespace {

constexpr int kMaxAscentIterations = 3000;
constexpr int kStallWindow = 5;
constexpr double kStallTolerance = 1e-10;

struct Evaluation {
  double value = 0.0;
  ComplexMatrix subgradient;
};

// Trace norm with a subgradient K (|K| <= 1, tr(K^* A) = |A|_S1). The full
// min(m, n) singular frame is used so rank-deficient points still move.
Evaluation evaluate(const ComplexMatrix& image) {
  Eigen::JacobiSVD<ComplexMatrix> svd(image, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Index k = std::min(image.rows(), image.cols());
  Evaluation e;
  e.value = svd.singularValues().sum();
  e.subgradient = svd.matrixU().leftCols(k) * svd.matrixV().leftCols(k).adjoint();
  return e;
}

ComplexVector tangent(const ComplexVector& g, const ComplexVector& x) {
  return g - x.dot(g).real() * x;  // dot() conjugates its left argument
}

struct StartResult {
  double value = -1.0;
  ComplexVector u;
  ComplexVector v;
};

// One projected-gradient step with backtracking along the sphere for the
// block selected by `which` (0 = u, 1 = v). Returns the accepted value.
double line_search(const RankOneTransformer& t, ComplexVector& u, ComplexVector& v, double value,
                   const ComplexVector& direction, int which, double& step) {
  const double slope = direction.squaredNorm();
  if (slope <= 1e-30 * std::max(1.0, value * value)) return value;
  for (int attempt = 0; attempt < 40; ++attempt) {
    ComplexVector trial = (which == 0 ? u : v) + step * direction;
    trial.normalize();
    const double candidate =
        which == 0 ? evaluate(t.image(trial, v)).value : evaluate(t.image(u, trial)).value;
    if (candidate >= value + 1e-4 * step * slope) {  // Armijo
      (which == 0 ? u : v) = std::move(trial);
      step = std::min(step * 2.0, 1e8);
      return candidate;
    }
    step *= 0.5;
  }
  step = 1.0;
  return value;
}

StartResult ascend(const RankOneTransformer& t, ComplexVector u, ComplexVector v) {
  double value = evaluate(t.image(u, v)).value;
  double step_u = 1.0;
  double step_v = 1.0;
  std::deque<double> history{value};
  for (int it = 0; it < kMaxAscentIterations; ++it) {
    {
      const Evaluation e = evaluate(t.image(u, v));
      const auto [gu, gv] = t.gradient(u, v, e.subgradient);
      value = line_search(t, u, v, e.value, tangent(gu, u), 0, step_u);
    }
    {
      const Evaluation e = evaluate(t.image(u, v));
      const auto [gu, gv] = t.gradient(u, v, e.subgradient);
      value = line_search(t, u, v, e.value, tangent(gv, v), 1, step_v);
    }
    history.push_back(value);
    if (static_cast<int>(history.size()) > kStallWindow) {
      const double old = history.front();
      history.pop_front();
      if (value - old <= kStallTolerance * std::max(value, 1e-300)) break;
    }
  }
  return {value, u, v};
}

std::pair<ComplexVector, ComplexVector> start_point(const RankOneTransformer& t, int index, std::uint64_t seed) {
  const Eigen::Index coordinate_pairs = t.u_dim * t.v_dim;
  if (index % 2 == 1 && index / 2 < coordinate_pairs) {
    const Eigen::Index k = index / 2;
    ComplexVector u = ComplexVector::Zero(t.u_dim);
    ComplexVector v = ComplexVector::Zero(t.v_dim);
    u(k / t.v_dim) = 1.0;
    v(k % t.v_dim) = 1.0;
    return {u, v};
  }
  auto rng = detail::make_rng(seed, static_cast<std::uint64_t>(index));
  ComplexVector u = detail::unit_gaussian_vector(rng, t.u_dim);
  ComplexVector v = detail::unit_gaussian_vector(rng, t.v_dim);
  return {u, v};
}

}  // namespace

int restart_threads() {
  if (const char* env = std::getenv("SHM_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
      // fall through to the hardware default
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

OracleEstimate maximize_rank_one(const RankOneTransformer& transformer, int restarts, std::uint64_t seed) {
  if (transformer.u_dim == 0 || transformer.v_dim == 0) throw DimensionError("maximize_rank_one: empty space");
  if (restarts < 1) throw ValidationError("maximize_rank_one: restarts must be >= 1");

  std::vector<StartResult> results(static_cast<std::size_t>(restarts));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < restarts; i = next++) {
      auto [u, v] = start_point(transformer, i, seed);
      results[static_cast<std::size_t>(i)] = ascend(transformer, std::move(u), std::move(v));
    }
  };
  const int threads = std::min(restart_threads(), restarts);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Deterministic reduction: largest value, ties to the lowest start index.
  int best = 0;
  for (int i = 1; i < restarts; ++i) {
    if (results[static_cast<std::size_t>(i)].value > results[static_cast<std::size_t>(best)].value) best = i;
  }
  OracleEstimate out;
  out.argmax_u = results[static_cast<std::size_t>(best)].u;
  out.argmax_v = results[static_cast<std::size_t>(best)].v;
  out.value = trace_norm(transformer.image(out.argmax_u, out.argmax_v));
  out.restarts = restarts;
  out.seed = seed;
  out.best_start = best;
  return out;
}

OracleEstimate s1_transformer_norm(const ComplexMatrix& phi, int restarts, std::uint64_t seed) {
  if (phi.rows() == 0 || phi.cols() == 0) throw DimensionError("s1_transformer_norm: empty matrix");
  RankOneTransformer t;
  t.u_dim = phi.rows();
  t.v_dim = phi.cols();
  t.image = [&phi](const ComplexVector& u, const ComplexVector& v) -> ComplexMatrix {
    return u.asDiagonal() * phi * v.conjugate().asDiagonal();
  };
  t.gradient = [&phi](const ComplexVector& u, const ComplexVector& v, const ComplexMatrix& k) {
    const ComplexMatrix weighted = k.cwiseProduct(phi.conjugate());
    return std::pair<ComplexVector, ComplexVector>{weighted * v, weighted.adjoint() * u};
  };
  return maximize_rank_one(t, restarts, seed);
}

DualityReport duality_gap_check(const ComplexMatrix& phi, int restarts, std::uint64_t seed, double rel_tol) {
  DualityReport report;
  report.s1_value = s1_transformer_norm(phi, restarts, seed).value;
  report.operator_value = multiplier_lower_bound(phi, std::max(1, restarts), seed).value;
  NormOptions options;
  options.seed = seed;
  const MultiplierNormResult norm = multiplier_norm(phi, rel_tol, options);
  report.lower = norm.lower;
  report.upper = norm.upper;
  report.violation = report.s1_value > norm.upper * (1.0 + 1e-6) ||
                     report.operator_value > norm.upper * (1.0 + 1e-6);
  return report;
}

}  // namespace shm
