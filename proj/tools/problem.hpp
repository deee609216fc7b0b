#pragma once

// Problem files: JSON documents with a top-level "kind" of matrix,
// step_kernel, step_symbol or spectral_problem. Complex scalars are
// [re, im] pairs; plain numbers are read as real.

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "shm/discretization.hpp"
#include "shm/numerics.hpp"
#include "shm/spectral.hpp"

namespace shm::cli {

using Json = nlohmann::ordered_json;

/// Malformed or schema-invalid input (exit code 2).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ProblemKind { Matrix, StepKernel, StepSymbol, SpectralProblem };

struct SpectralProblem {
  FiniteSpectralMeasure e1;
  FiniteSpectralMeasure e2;
  SymbolOnSpectra symbol;
  std::optional<ComplexMatrix> op;  ///< T for doi
};

struct Problem {
  ProblemKind kind = ProblemKind::Matrix;
  ComplexMatrix matrix;  ///< the symbol's value matrix for every kind
  std::optional<StepFunction> step;
  std::optional<SpectralProblem> spectral;
};

const char* kind_name(ProblemKind kind);

Problem parse_problem(const std::string& text);

Complex parse_complex(const Json& j);
ComplexMatrix parse_matrix(const Json& j);
FiniteMeasureSpace parse_space(const Json& j);
FiniteSpectralMeasure parse_spectral_measure(const Json& j);

Json to_json(Complex z);
Json to_json(const ComplexMatrix& m);
Json to_json(const RealVector& v);

}  // namespace shm::cli
