// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Usage: acceptance <path to shm executable> <fixture dir>

#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "oracles.hpp"
#include "shm/discretization.hpp"
#include "shm/oracle.hpp"
#include "shm/schur.hpp"
#include "shm/spectral.hpp"

using shm::Complex;
using shm::ComplexMatrix;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Every factorization produced during the run, checked by criterion 10.
struct EmittedWitness {
  ComplexMatrix phi;
  shm::HaagerupFactorization witness;
  double upper;
};
std::vector<EmittedWitness> g_witnesses;

shm::MultiplierNormResult norm(const ComplexMatrix& phi, double rel_tol, std::uint64_t seed = 0) {
  shm::NormOptions o;
  o.seed = seed;
  auto r = shm::multiplier_norm(phi, rel_tol, o);
  g_witnesses.push_back({phi, r.witness, r.upper});
  return r;
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << x;
  return s.str();
}

bool contains(const shm::MultiplierNormResult& r, double value) {
  // Bracket endpoints carry rounding of a few ulps.
  const double slack = 16 * std::numeric_limits<double>::epsilon() * std::max(1.0, value);
  return r.lower <= value + slack && value - slack <= r.upper;
}

shm::FiniteSpectralMeasure coordinate_measure(Eigen::Index n) {
  std::vector<ComplexMatrix> ps;
  Eigen::VectorXd pts(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ps.push_back(ComplexMatrix::Zero(n, n));
    ps.back()(i, i) = 1.0;
    pts(i) = static_cast<double>(i);
  }
  return shm::FiniteSpectralMeasure(pts, ps);
}

// Hermitian 6x6 with `profile` giving the multiplicity of each of
// profile.size() distinct eigenvalues.
ComplexMatrix hermitian_with_profile(std::mt19937_64& g, const std::vector<int>& profile) {
  std::vector<double> eig;
  std::uniform_real_distribution<double> gap(0.5, 2.0);
  double x = -3.0;
  for (int m : profile) {
    x += gap(g);
    for (int i = 0; i < m; ++i) eig.push_back(x);
  }
  const auto n = static_cast<Eigen::Index>(eig.size());
  const ComplexMatrix u = gen::unitary(g, n);
  return u * Eigen::Map<Eigen::VectorXd>(eig.data(), n).asDiagonal() * u.adjoint();
}

std::vector<int> random_profile(std::mt19937_64& g, int n) {
  const int parts = static_cast<int>(gen::uniform_int(g, 2, 4));
  std::vector<int> profile(static_cast<std::size_t>(parts), 1);
  for (int left = n - parts; left > 0; --left) ++profile[static_cast<std::size_t>(gen::uniform_int(g, 0, parts - 1))];
  return profile;
}

shm::StepFunction random_step(std::mt19937_64& g, Eigen::Index m, Eigen::Index n) {
  shm::StepFunction s;
  s.row_space = shm::FiniteMeasureSpace(gen::positive(g, m, 0.05, 20.0));
  s.col_space = shm::FiniteMeasureSpace(gen::positive(g, n, 0.05, 20.0));
  s.values = gen::disc_matrix(g, m, n);
  return s;
}

template <typename Step>
Step as(const shm::StepFunction& f) {
  Step s;
  static_cast<shm::StepFunction&>(s) = f;
  return s;
}

// 1
Outcome trivial_norms() {
  Outcome o;
  double worst = 0.0;
  for (Eigen::Index n = 2; n <= 8; ++n) {
    for (const ComplexMatrix& phi : {ComplexMatrix(ComplexMatrix::Ones(n, n)), ComplexMatrix(ComplexMatrix::Identity(n, n))}) {
      const auto r = norm(phi, 1e-6);
      worst = std::max(worst, r.upper - r.lower);
      if (!contains(r, 1.0) || r.upper - r.lower > 1e-6) o.pass = false;
    }
  }
  const auto z = norm(ComplexMatrix::Zero(4, 3), 1e-6);
  if (z.lower != 0.0 || z.upper != 0.0) o.pass = false;
  o.detail = "max width " + fmt(worst) + " (<= 1e-6), zero -> [" + fmt(z.lower) + ", " + fmt(z.upper) + "]";
  return o;
}

// 2
Outcome hadamard() {
  Outcome o;
  const ComplexMatrix h = gen::hadamard2();
  const auto r = norm(h, 1e-4);
  const double s1 = shm::s1_transformer_norm(h, 64, 0).value;
  const double root2 = std::sqrt(2.0);
  o.pass = contains(r, root2) && r.upper - r.lower <= 1e-4 && std::abs(s1 - root2) <= 1e-3 * root2;
  o.detail = "bracket width " + fmt(r.upper - r.lower) + ", oracle rel. error " + fmt(std::abs(s1 - root2) / root2);
  return o;
}

// 3
Outcome sandwich() {
  Outcome o;
  double worst_gap = 0.0;
  double worst_excess = -1.0;
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto g = gen::rng(3000 + seed);
    const ComplexMatrix phi = gen::disc_matrix(g, gen::uniform_int(g, 2, 6), gen::uniform_int(g, 2, 6));
    // rel_tol small enough that C_up - C_lo < 1e-6 for these sizes.
    const auto r = norm(phi, 1e-7, seed);
    const double oracle = shm::s1_transformer_norm(phi, 64, seed).value;
    const auto proj = shm::projective_certificate(r.witness.X.transpose(), r.witness.Y.adjoint());
    const bool represented = (proj.represented - phi).cwiseAbs().maxCoeff() <= 1e-8 * (1 + r.upper);
    const bool chain = oracle <= r.lower + 1e-6 && r.lower <= r.upper &&
                       r.upper <= r.witness.bound * (1 + 1e-8) && r.witness.bound <= proj.value * (1 + 1e-12);
    const double gap = (r.upper - oracle) / r.upper;
    worst_gap = std::max(worst_gap, gap);
    worst_excess = std::max(worst_excess, oracle - r.lower);
    if (!(chain && represented && gap <= 1e-3 && r.converged)) ++failures;
  }
  o.pass = failures == 0;
  o.detail = std::to_string(30 - failures) + "/30 chains hold, max (C_up - oracle)/C_up " + fmt(worst_gap) +
             ", max oracle - C_lo " + fmt(worst_excess);
  return o;
}

// 4
Outcome weight_independence() {
  Outcome o;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto g = gen::rng(4000 + seed);
    const auto f = random_step(g, gen::uniform_int(g, 1, 5), gen::uniform_int(g, 1, 5));
    auto unit = f;
    unit.row_space = shm::FiniteMeasureSpace(shm::RealVector::Ones(f.row_space.size()));
    unit.col_space = shm::FiniteMeasureSpace(shm::RealVector::Ones(f.col_space.size()));
    const auto a = shm::step_multiplier_norm(as<shm::StepSymbol>(f), 1e-4);
    const auto b = shm::step_multiplier_norm(as<shm::StepSymbol>(unit), 1e-4);
    worst = std::max({worst, std::abs(a.lower - b.lower), std::abs(a.upper - b.upper)});
  }
  o.pass = worst <= 1e-9;
  o.detail = "max bracket difference " + fmt(worst) + " (<= 1e-9)";
  return o;
}

// 5
Outcome weighted_reduction() {
  Outcome o;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto g = gen::rng(5000 + seed);
    const auto k = as<shm::StepKernel>(random_step(g, gen::uniform_int(g, 1, 6), gen::uniform_int(g, 1, 6)));
    const double reduced = shm::kernel_operator_norm(k);
    const double direct = oracle::weighted_operator_norm(k.values, k.row_space.masses(), k.col_space.masses(), g, 3);
    worst = std::max(worst, std::abs(reduced - direct) / direct);
  }
  o.pass = worst <= 1e-10;
  o.detail = "max relative difference " + fmt(worst) + " (<= 1e-10)";
  return o;
}

// 6
Outcome contraction() {
  Outcome o;
  int bad = 0;
  double worst_op = 0.0;
  double worst_m = 0.0;
  const double rel_tol = 1e-4;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto g = gen::rng(6100 + seed);
    const Eigen::Index m = gen::uniform_int(g, 2, 6);
    const Eigen::Index n = gen::uniform_int(g, 2, 6);
    const Eigen::Index cm = gen::uniform_int(g, 1, m);
    const Eigen::Index cn = gen::uniform_int(g, 1, n);
    const shm::Coarsening rows(gen::surjection(g, m, cm), cm);
    const shm::Coarsening cols(gen::surjection(g, n, cn), cn);
    const auto f = random_step(g, m, n);
    const auto op = shm::projection_contracts_operator_norm(as<shm::StepKernel>(f), rows, cols);
    const auto mult = shm::projection_contracts_multiplier_norm(as<shm::StepSymbol>(f), rows, cols, rel_tol);
    worst_op = std::max(worst_op, op.coarse / op.fine - 1.0);
    worst_m = std::max(worst_m, mult.coarse / mult.fine - 1.0);
    if (!op.holds || !mult.holds) ++bad;
  }
  o.pass = bad == 0;
  o.detail = std::to_string(20 - bad) + "/20 hold, max coarse/fine - 1: operator " + fmt(worst_op) +
             " (<= 1e-10), multiplier " + fmt(worst_m) + " (<= 3e-4)";
  return o;
}

// 7
Outcome rescaling() {
  Outcome o;
  double worst_op = 0.0;
  double worst_m = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto g = gen::rng(7000 + seed);
    const Eigen::Index m = gen::uniform_int(g, 1, 5);
    const Eigen::Index n = gen::uniform_int(g, 1, 5);
    const auto f = random_step(g, m, n);
    const auto xi = gen::positive(g, m, 0.1, 10.0);
    const auto eta = gen::positive(g, n, 0.1, 10.0);
    const auto k = as<shm::StepKernel>(f);
    const auto k0 = shm::density_rescale(k, xi, eta);
    const double a = shm::kernel_operator_norm(k);
    worst_op = std::max(worst_op, std::abs(shm::kernel_operator_norm(k0) - a) / a);
    const auto phi = as<shm::StepSymbol>(f);
    const auto b1 = shm::step_multiplier_norm(phi, 1e-4);
    const auto b2 = shm::step_multiplier_norm(shm::density_rescale(phi, xi, eta), 1e-4);
    worst_m = std::max({worst_m, std::abs(b1.lower - b2.lower), std::abs(b1.upper - b2.upper)});
  }
  o.pass = worst_op <= 1e-9 && worst_m <= 1e-9;
  o.detail = "max operator-norm rel. change " + fmt(worst_op) + ", max bracket change " + fmt(worst_m) + " (<= 1e-9)";
  return o;
}

// 8
Outcome doi_identities() {
  Outcome o;
  auto g = gen::rng(8000);
  const ComplexMatrix a = hermitian_with_profile(g, {2, 1, 3});
  const ComplexMatrix b = hermitian_with_profile(g, {1, 1, 2, 2});
  const auto ea = shm::spectral_measure_of_hermitian(a);
  const auto eb = shm::spectral_measure_of_hermitian(b);
  const ComplexMatrix t = gen::gaussian(g, 6, 6);
  const auto one = shm::SymbolOnSpectra::evaluate(ea, eb, [](double, double) { return Complex(1.0); });
  const double e_one = (shm::doi(one, ea, eb, t) - t).cwiseAbs().maxCoeff();
  const auto sum = shm::SymbolOnSpectra::evaluate(ea, ea, [](double x, double y) { return Complex(x + y); });
  const double e_sum = (shm::doi(sum, ea, ea, t) - (a * t + t * a)).cwiseAbs().maxCoeff();
  const auto phi = [](double x) { return Complex(std::exp(-x), std::sin(x)); };
  const auto psi = [](double y) { return Complex(1.0 + y * y, y); };
  const auto sep = shm::SymbolOnSpectra::evaluate(ea, eb, [&](double x, double y) { return phi(x) * psi(y); });
  const double e_sep = (shm::doi(sep, ea, eb, t) - ea.apply(phi) * t * eb.apply(psi)).cwiseAbs().maxCoeff();
  int hs_ok = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto gs = gen::rng(8100 + seed);
    const auto e1 = shm::spectral_measure_of_hermitian(hermitian_with_profile(gs, random_profile(gs, 6)));
    const auto e2 = shm::spectral_measure_of_hermitian(hermitian_with_profile(gs, random_profile(gs, 6)));
    const shm::SymbolOnSpectra s{gen::disc_matrix(gs, e1.size(), e2.size())};
    if (shm::doi_hs_bound_check(s, e1, e2, gen::gaussian(gs, 6, 6)).holds) ++hs_ok;
  }
  // Entries of T, AT + TA and phi(A) T psi(B) are O(10); 1e-12 is absolute.
  o.pass = e_one <= 1e-12 && e_sum <= 1e-12 && e_sep <= 1e-12 && hs_ok == 20;
  o.detail = "Phi=1 err " + fmt(e_one) + ", x+y err " + fmt(e_sum) + ", separable err " + fmt(e_sep) +
             ", HS bound " + std::to_string(hs_ok) + "/20";
  return o;
}

// 9
Outcome spectral_isometry() {
  Outcome o;
  int passes = 0;
  double worst_gap = 0.0;
  double worst_bracket = 0.0;
  double worst_oracle = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto g = gen::rng(9000 + seed);
    const auto e1 = shm::spectral_measure_of_hermitian(hermitian_with_profile(g, random_profile(g, 6)));
    const auto e2 = shm::spectral_measure_of_hermitian(hermitian_with_profile(g, random_profile(g, 6)));
    const shm::SymbolOnSpectra phi{gen::disc_matrix(g, e1.size(), e2.size())};
    const auto r = shm::verify_isometry(phi, e1, e2, 1e-3, 64, seed);
    g_witnesses.push_back({phi.values, r.bracket.witness, r.bracket.upper});
    // Same symbol with every projection of rank one.
    const auto flat1 = coordinate_measure(e1.size());
    const auto flat2 = coordinate_measure(e2.size());
    const auto flat = shm::verify_isometry(phi, flat1, flat2, 1e-3, 64, seed);
    const double gap = (r.bracket.upper - r.oracle.value) / r.bracket.upper;
    const double bracket_change = std::max(std::abs(r.bracket.upper - flat.bracket.upper),
                                           std::abs(r.bracket.lower - flat.bracket.lower)) / r.bracket.upper;
    const double oracle_change = std::abs(r.oracle.value - flat.oracle.value) / flat.oracle.value;
    worst_gap = std::max(worst_gap, gap);
    worst_bracket = std::max(worst_bracket, bracket_change);
    worst_oracle = std::max(worst_oracle, oracle_change);
    if (r.pass && flat.pass && gap <= 1e-3 && bracket_change <= 1e-3 && oracle_change <= 1e-3) ++passes;
  }
  o.pass = passes == 20;
  o.detail = std::to_string(passes) + "/20 pass, max (C_up - oracle)/C_up " + fmt(worst_gap) +
             ", multiplicity change: bracket " + fmt(worst_bracket) + ", oracle " + fmt(worst_oracle);
  return o;
}

// 10
Outcome witness_validity() {
  Outcome o;
  int bad = 0;
  double worst_residual = 0.0;
  for (const auto& w : g_witnesses) {
    const double residual = w.witness.rank() == 0 ? w.phi.cwiseAbs().maxCoeff() : w.witness.residual(w.phi);
    worst_residual = std::max(worst_residual, residual / (1 + w.witness.bound));
    if (residual > 1e-8 * (1 + w.witness.bound) || w.witness.bound > w.upper * (1 + 1e-8)) ++bad;
  }
  o.pass = bad == 0 && !g_witnesses.empty();
  o.detail = std::to_string(g_witnesses.size() - static_cast<std::size_t>(bad)) + "/" +
             std::to_string(g_witnesses.size()) + " witnesses valid, max residual/(1+bound) " + fmt(worst_residual);
  return o;
}

std::string run_capture(const std::string& cmd, int& status) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  status = pclose(pipe);
  return out;
}

// 11
Outcome cli_determinism(const std::string& exe, const std::string& data) {
  Outcome o;
  const std::vector<std::string> runs = {
      "mnorm " + data + "/random4.json --seed 3",
      "factorize " + data + "/hadamard2.json",
      "doi " + data + "/isometry_hadamard.json",
      "discretize " + data + "/kernel5x4.json --epsilon 2.5",
      "verify-isometry " + data + "/isometry_hadamard.json --restarts 32 --seed 5",
  };
  int identical = 0;
  for (const auto& args : runs) {
    int s1 = 0, s2 = 0, s3 = 0;
    const std::string a = run_capture(exe + " " + args + " 2>/dev/null", s1);
    const std::string b = run_capture(exe + " " + args + " 2>/dev/null", s2);
    const std::string c = run_capture("SHM_THREADS=1 " + exe + " " + args + " 2>/dev/null", s3);
    if (!a.empty() && a == b && a == c && s1 == 0 && s2 == 0 && s3 == 0) ++identical;
  }
  o.pass = identical == static_cast<int>(runs.size());
  o.detail = std::to_string(identical) + "/" + std::to_string(runs.size()) +
             " commands byte-identical across runs (and with SHM_THREADS=1)";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: acceptance <shm executable> <fixture dir>\n";
    return 2;
  }
  const std::string exe = argv[1];
  const std::string data = argv[2];

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"trivial-norm suite", trivial_norms},
      {"hadamard", hadamard},
      {"sandwich", sandwich},
      {"weight independence", weight_independence},
      {"weighted reduction", weighted_reduction},
      {"contraction", contraction},
      {"rescaling invariance", rescaling},
      {"doi identities", doi_identities},
      {"spectral isometry", spectral_isometry},
      {"witness validity", witness_validity},
      {"cli determinism", [&] { return cli_determinism(exe, data); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << (i + 1) << "] " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
