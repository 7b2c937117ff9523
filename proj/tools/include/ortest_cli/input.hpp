#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ortest/cone.hpp"
#include "ortest/error.hpp"
#include "ortest/studies.hpp"
#include "ortest/subspace.hpp"
#include "ortest/testing.hpp"
#include "ortest_cli/report.hpp"

namespace ortest::cli {

/// Malformed input document. Syntax errors carry a 1-based line and column.
class InputError : public ContractError {
 public:
  InputError(const std::string& what, int line = 0, int column = 0)
      : ContractError(what), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// Parses JSON text; syntax errors become InputError "source:line:column: ...".
Json parse_document(const std::string& text, const std::string& source);
Json read_document(const std::string& path);

/// A Type A problem with its data and any settings carried by the document.
struct ProblemInput {
  std::string name;
  std::optional<Statistic> stat;
  std::optional<LinearSubspace> sub;
  std::optional<ConeSpec> cone;
  std::optional<ContingencyTable2xK> table;
  std::optional<StochasticOrderProblem> ordering;
  std::optional<double> alpha;
  std::optional<double> gamma;
  std::optional<std::uint64_t> mc_n;
  std::optional<std::uint64_t> mc_seed;
  /// The inputs as they will be echoed in the report.
  Json echo;
};

/// Either {s_n, sigma_n, n, restriction | order, [null_basis], [alpha],
/// [gamma], [mc]} or {control, treatment, [labels], ...}.
ProblemInput load_problem(const Json& doc);

/// silvapulle, cs-table5, cs-table6, cs-table5-doubled.
ProblemInput builtin_case(const std::string& name);

Vector json_vector(const Json& j, const std::string& field);
Matrix json_matrix(const Json& j, const std::string& field);
Json to_json(const Vector& v);
Json to_json(const Matrix& m);

}  // namespace ortest::cli
