#include "problem.hpp"

#include <cmath>

#include "shm/errors.hpp"

namespace shm::cli {

namespace {

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw ParseError(std::string("missing field \"") + name + "\"");
  return j.at(name);
}

double finite_number(const Json& j, const char* what) {
  if (!j.is_number()) throw ParseError(std::string(what) + ": expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw ParseError(std::string(what) + ": not finite");
  return x;
}

RealVector parse_real_vector(const Json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array");
  RealVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = finite_number(j[i], what);
  return v;
}

// sum_pq c_pq x^p y^q
SymbolOnSpectra polynomial_symbol(const Json& coefficients, const FiniteSpectralMeasure& e1,
                                  const FiniteSpectralMeasure& e2) {
  const ComplexMatrix c = parse_matrix(coefficients);
  return SymbolOnSpectra::evaluate(e1, e2, [&c](double x, double y) {
    Complex total = 0.0;
    for (Eigen::Index p = 0; p < c.rows(); ++p)
      for (Eigen::Index q = 0; q < c.cols(); ++q) total += c(p, q) * std::pow(x, p) * std::pow(y, q);
    return total;
  });
}

StepFunction parse_step(const Json& j) {
  StepFunction s;
  s.row_space = parse_space(field(j, "rows"));
  s.col_space = parse_space(field(j, "cols"));
  s.values = parse_matrix(field(j, "values"));
  s.validate();
  return s;
}

}  // namespace

const char* kind_name(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Matrix: return "matrix";
    case ProblemKind::StepKernel: return "step_kernel";
    case ProblemKind::StepSymbol: return "step_symbol";
    case ProblemKind::SpectralProblem: return "spectral_problem";
  }
  return "unknown";
}

Complex parse_complex(const Json& j) {
  if (j.is_number()) return {finite_number(j, "scalar"), 0.0};
  if (j.is_array() && j.size() == 2) return {finite_number(j[0], "real part"), finite_number(j[1], "imaginary part")};
  throw ParseError("complex scalar: expected a number or [re, im]");
}

ComplexMatrix parse_matrix(const Json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("matrix: expected a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw ParseError("matrix: rows must be non-empty arrays");
  ComplexMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw ParseError("matrix: rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_complex(j[r][c]);
    }
  }
  return m;
}

FiniteMeasureSpace parse_space(const Json& j) {
  RealVector masses = parse_real_vector(field(j, "masses"), "masses");
  if (masses.size() == 0) throw ParseError("measure space: at least one cell");
  if (!j.contains("labels")) return FiniteMeasureSpace(masses);
  std::vector<std::string> labels;
  for (const auto& l : field(j, "labels")) {
    if (!l.is_string()) throw ParseError("labels: expected strings");
    labels.push_back(l.get<std::string>());
  }
  return FiniteMeasureSpace(std::move(labels), std::move(masses));
}

FiniteSpectralMeasure parse_spectral_measure(const Json& j) {
  if (j.is_object() && j.contains("hermitian_matrix")) {
    const double tol = j.contains("group_tol") ? finite_number(j.at("group_tol"), "group_tol") : kDefaultGroupTolerance;
    return spectral_measure_of_hermitian(parse_matrix(j.at("hermitian_matrix")), tol);
  }
  const RealVector points = parse_real_vector(field(j, "points"), "points");
  std::vector<ComplexMatrix> projections;
  const Json& ps = field(j, "projections");
  if (!ps.is_array()) throw ParseError("projections: expected an array of matrices");
  for (const auto& p : ps) projections.push_back(parse_matrix(p));
  return FiniteSpectralMeasure(points, std::move(projections));
}

Problem parse_problem(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  const Json& kind = field(j, "kind");
  if (!kind.is_string()) throw ParseError("kind: expected a string");
  const std::string k = kind.get<std::string>();
  Problem p;
  try {
    if (k == "matrix") {
      p.kind = ProblemKind::Matrix;
      p.matrix = parse_matrix(field(j, "matrix"));
    } else if (k == "step_kernel" || k == "step_symbol") {
      p.kind = k == "step_kernel" ? ProblemKind::StepKernel : ProblemKind::StepSymbol;
      p.step = parse_step(j);
      p.matrix = p.step->values;
    } else if (k == "spectral_problem") {
      p.kind = ProblemKind::SpectralProblem;
      auto e1 = parse_spectral_measure(field(j, "e1"));
      auto e2 = parse_spectral_measure(field(j, "e2"));
      const Json& s = field(j, "symbol");
      SymbolOnSpectra symbol;
      if (s.is_object() && s.contains("values")) {
        symbol.values = parse_matrix(s.at("values"));
        symbol.validate(e1, e2);
      } else if (s.is_object() && s.contains("polynomial")) {
        symbol = polynomial_symbol(s.at("polynomial"), e1, e2);
      } else {
        throw ParseError("symbol: expected {\"values\": ...} or {\"polynomial\": ...}");
      }
      std::optional<ComplexMatrix> op;
      if (j.contains("operator")) op = parse_matrix(j.at("operator"));
      p.matrix = symbol.values;
      p.spectral = SpectralProblem{std::move(e1), std::move(e2), std::move(symbol), std::move(op)};
    } else {
      throw ParseError("unknown kind \"" + k + "\"");
    }
  } catch (const std::invalid_argument& e) {
    // DimensionError / ValidationError from the domain constructors.
    throw ParseError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
  return p;
}

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const RealVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace shm::cli
