#include "commands.hpp"

#include <array>

namespace shm::cli {

namespace {

constexpr std::array<const char*, 5> kCommands{"mnorm", "factorize", "doi", "discretize", "verify-isometry"};

Json settings(const std::string& command, const CommandOptions& o) {
  Json s;
  s["rel_tol"] = o.rel_tol;
  s["seed"] = o.seed;
  if (command == "verify-isometry") s["restarts"] = o.restarts;
  if (command == "discretize") s["epsilon"] = o.epsilon;
  return s;
}

Json factorization_json(const HaagerupFactorization& f, const ComplexMatrix& phi, bool with_blocks) {
  Json j;
  j["rank"] = f.rank();
  j["bound"] = f.bound;
  j["residual"] = f.residual(phi);
  if (with_blocks) {
    j["X"] = to_json(f.X);
    j["Y"] = to_json(f.Y);
  }
  return j;
}

Json bracket_json(const MultiplierNormResult& r, const ComplexMatrix& phi, bool with_blocks) {
  Json j;
  j["lower"] = r.lower;
  j["upper"] = r.upper;
  j["width"] = r.upper - r.lower;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["witness"] = factorization_json(r.witness, phi, with_blocks);
  Json cert;
  cert["level"] = r.certificate.level;
  cert["max_diagonal"] = r.certificate.max_diagonal();
  cert["min_eigenvalue"] = r.upper > 0.0 ? r.certificate.min_eigenvalue(phi) : 0.0;
  cert["valid"] = r.upper > 0.0 ? r.certificate.valid_for(phi) : true;
  j["certificate"] = cert;
  if (r.upper > 0.0) {
    Json lw;
    lw["operator_norm"] = operator_norm(r.lower_witness);
    lw["image_norm"] = operator_norm(schur_product(phi, r.lower_witness));
    j["lower_witness"] = lw;
  }
  return j;
}

NormOptions norm_options(const CommandOptions& o) {
  NormOptions n;
  n.seed = o.seed;
  return n;
}

void require_symbol_kind(const Problem& p, const std::string& command) {
  if (p.kind == ProblemKind::StepKernel) {
    throw ParseError(command + ": expects a matrix, step_symbol or spectral_problem file");
  }
}

CommandResult cmd_mnorm(const Problem& p, const CommandOptions& o, bool with_blocks) {
  const MultiplierNormResult r = multiplier_norm(p.matrix, o.rel_tol, norm_options(o));
  CommandResult out;
  out.report = bracket_json(r, p.matrix, with_blocks);
  out.exit_code = r.converged ? kOk : kNotConverged;
  return out;
}

CommandResult cmd_doi(const Problem& p) {
  if (!p.spectral || !p.spectral->op) throw ParseError("doi: expects a spectral_problem with an \"operator\"");
  const SpectralProblem& s = *p.spectral;
  CommandResult out;
  out.report["output"] = to_json(doi(s.symbol, s.e1, s.e2, *s.op));
  const HsBoundReport hs = doi_hs_bound_check(s.symbol, s.e1, s.e2, *s.op);
  out.report["hs_bound"] = {{"lhs", hs.lhs}, {"rhs", hs.rhs}, {"holds", hs.holds}};
  out.exit_code = hs.holds ? kOk : kVerificationFailed;
  return out;
}

CommandResult cmd_discretize(const Problem& p, const CommandOptions& o) {
  if (!p.step) throw ParseError("discretize: expects a step_symbol or step_kernel file");
  StepSymbol fine;
  static_cast<StepFunction&>(fine) = *p.step;
  const SymbolApproximation a = approximate_symbol(fine, o.epsilon, o.rel_tol, norm_options(o));
  CommandResult out;
  Json coarse;
  coarse["rows"] = {{"labels", a.coarse.row_space.labels()}, {"masses", to_json(a.coarse.row_space.masses())}};
  coarse["cols"] = {{"labels", a.coarse.col_space.labels()}, {"masses", to_json(a.coarse.col_space.masses())}};
  coarse["values"] = to_json(a.coarse.values);
  out.report["coarse"] = coarse;
  out.report["row_map"] = a.rows.map();
  out.report["col_map"] = a.cols.map();
  out.report["merges"] = a.merges;
  out.report["l2_error"] = a.l2_error;
  out.report["multiplier_norm"] = {{"fine_upper", a.norms.fine}, {"coarse_upper", a.norms.coarse}, {"holds", a.norms.holds}};
  bool holds = a.norms.holds;
  if (p.kind == ProblemKind::StepKernel) {
    StepKernel k;
    static_cast<StepFunction&>(k) = *p.step;
    const ContractionReport op = projection_contracts_operator_norm(k, a.rows, a.cols);
    out.report["operator_norm"] = {{"fine", op.fine}, {"coarse", op.coarse}, {"holds", op.holds}};
    holds = holds && op.holds;
  }
  out.exit_code = holds ? kOk : kVerificationFailed;
  return out;
}

CommandResult cmd_verify(const Problem& p, const CommandOptions& o) {
  if (!p.spectral) throw ParseError("verify-isometry: expects a spectral_problem file");
  const SpectralProblem& s = *p.spectral;
  const IsometryReport r = verify_isometry(s.symbol, s.e1, s.e2, o.rel_tol, o.restarts, o.seed);
  CommandResult out;
  out.report["bracket"] = bracket_json(r.bracket, s.symbol.values, false);
  Json oracle;
  oracle["value"] = r.oracle.value;
  oracle["best_start"] = r.oracle.best_start;
  oracle["argmax_u"] = to_json(ComplexMatrix(r.oracle.argmax_u));
  oracle["argmax_v"] = to_json(ComplexMatrix(r.oracle.argmax_v));
  out.report["oracle"] = oracle;
  Json ranks;
  ranks["e1"] = s.e1.ranks();
  ranks["e2"] = s.e2.ranks();
  out.report["multiplicities"] = ranks;
  out.report["checks"] = {{"oracle_below_upper", r.oracle_below_upper}, {"gap_closed", r.gap_closed}};
  out.report["pass"] = r.pass;
  out.exit_code = r.pass ? (r.bracket.converged ? kOk : kNotConverged) : kVerificationFailed;
  return out;
}

}  // namespace

bool known_command(const std::string& command) {
  for (const char* c : kCommands)
    if (command == c) return true;
  return false;
}

CommandResult run_command(const std::string& command, const std::string& problem_text,
                          const CommandOptions& options, const std::string& input_digest) {
  if (!known_command(command)) throw ParseError("unknown command \"" + command + "\"");
  if (!(options.rel_tol > 0.0 && options.rel_tol <= 0.1)) throw ParseError("--rel-tol must be in (0, 0.1]");
  if (options.restarts < 1) throw ParseError("--restarts must be >= 1");
  if (!(options.epsilon > 0.0)) throw ParseError("--epsilon must be positive");
  const Problem p = parse_problem(problem_text);

  CommandResult body;
  if (command == "mnorm" || command == "factorize") {
    require_symbol_kind(p, command);
    body = cmd_mnorm(p, options, command == "factorize");
  } else if (command == "doi") {
    body = cmd_doi(p);
  } else if (command == "discretize") {
    body = cmd_discretize(p, options);
  } else {
    body = cmd_verify(p, options);
  }

  CommandResult out;
  out.report["command"] = command;
  out.report["input"] = {{"kind", kind_name(p.kind)}, {"sha256", input_digest}};
  out.report["settings"] = settings(command, options);
  out.report["result"] = std::move(body.report);
  out.report["exit_code"] = body.exit_code;
  out.exit_code = body.exit_code;
  return out;
}

}  // namespace shm::cli
