#include "ortest_cli/input.hpp"

#include <fstream>
#include <sstream>

namespace ortest::cli {
namespace {

std::string where(const std::string& field) { return field.empty() ? "document" : "'" + field + "'"; }

const Json& member(const Json& doc, const char* key) {
  if (!doc.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  return doc.at(key);
}

double json_number(const Json& j, const std::string& field) {
  if (!j.is_number()) throw InputError(where(field) + " must be a number");
  return j.get<double>();
}

long json_count(const Json& j, const std::string& field) {
  if (!j.is_number_integer()) throw InputError(where(field) + " must be an integer");
  return j.get<long>();
}

double json_level(const Json& j, const std::string& field) {
  const double v = json_number(j, field);
  if (!(v > 0.0 && v < 1.0)) throw InputError(where(field) + " must lie in (0, 1)");
  return v;
}

std::vector<long> json_counts(const Json& j, const std::string& field) {
  if (!j.is_array()) throw InputError(where(field) + " must be an array of counts");
  std::vector<long> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const long c = json_count(j[i], field + "[" + std::to_string(i) + "]");
    if (c < 0) throw InputError(where(field) + " has a negative count");
    out.push_back(c);
  }
  return out;
}

ConeSpec parse_order(const Json& j, Index m) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "simple") return ConeSpec::simple_order(m);
    if (name == "tree") return ConeSpec::tree_order(m);
    if (name == "orthant") return ConeSpec::orthant(m);
    throw InputError("unknown order '" + name + "' (expected simple, tree, orthant or {\"umbrella\": peak})");
  }
  if (j.is_object() && j.size() == 1 && j.contains("umbrella")) {
    const long peak = json_count(j.at("umbrella"), "order.umbrella");
    if (peak < 1 || peak > m) throw InputError("'order.umbrella' peak must lie in 1.." + std::to_string(m));
    return ConeSpec::umbrella_order(m, peak - 1);
  }
  throw InputError("'order' must be a string or {\"umbrella\": peak}");
}

void read_settings(const Json& doc, ProblemInput& in) {
  if (doc.contains("alpha")) in.alpha = json_level(doc.at("alpha"), "alpha");
  if (doc.contains("gamma")) in.gamma = json_level(doc.at("gamma"), "gamma");
  if (doc.contains("mc")) {
    const Json& mc = doc.at("mc");
    if (!mc.is_object()) throw InputError("'mc' must be an object {N, seed}");
    if (mc.contains("N")) {
      const long n = json_count(mc.at("N"), "mc.N");
      if (n < 1) throw InputError("'mc.N' must be positive");
      in.mc_n = static_cast<std::uint64_t>(n);
    }
    if (mc.contains("seed")) {
      if (!mc.at("seed").is_number_unsigned()) throw InputError("'mc.seed' must be a nonnegative integer");
      in.mc_seed = mc.at("seed").get<std::uint64_t>();
    }
  }
}

ProblemInput from_table(const ContingencyTable2xK& table, std::string name) {
  ProblemInput in;
  in.name = std::move(name);
  in.table = table;
  in.ordering = build_stochastic_order(table);
  in.stat = in.ordering->statistic();
  in.sub = in.ordering->null_space;
  in.cone = in.ordering->cone;
  in.echo = Json::object();
  in.echo["control"] = table.control;
  in.echo["treatment"] = table.treatment;
  if (!table.labels.empty()) in.echo["labels"] = table.labels;
  return in;
}

}  // namespace

Json parse_document(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // byte is the 1-based offset of the offending character.
    const std::size_t byte = e.byte == 0 ? 0 : e.byte - 1;
    int line = 1, column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string msg = e.what();
    if (const auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw InputError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + msg,
                     line, column);
  }
}

Json read_document(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot read input file '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_document(ss.str(), path);
}

Vector json_vector(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw InputError(where(field) + " must be a non-empty array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Index>(i)) = json_number(j[i], field + "[" + std::to_string(i) + "]");
  }
  return v;
}

Matrix json_matrix(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw InputError(where(field) + " must be a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string row_field = field + "[" + std::to_string(r) + "]";
    const Vector row = json_vector(j[r], row_field);
    if (static_cast<std::size_t>(row.size()) != cols) throw InputError(where(field) + " has rows of unequal length");
    m.row(static_cast<Index>(r)) = row.transpose();
  }
  return m;
}

Json to_json(const Vector& v) {
  Json j = Json::array();
  for (Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

Json to_json(const Matrix& m) {
  Json j = Json::array();
  for (Index r = 0; r < m.rows(); ++r) j.push_back(to_json(Vector(m.row(r).transpose())));
  return j;
}

ProblemInput load_problem(const Json& doc) {
  if (!doc.is_object()) throw InputError("input document must be a JSON object");
  if (doc.contains("control") || doc.contains("treatment")) {
    ContingencyTable2xK table;
    table.control = json_counts(member(doc, "control"), "control");
    table.treatment = json_counts(member(doc, "treatment"), "treatment");
    if (doc.contains("labels")) {
      if (!doc.at("labels").is_array()) throw InputError("'labels' must be an array of strings");
      for (const auto& l : doc.at("labels")) {
        if (!l.is_string()) throw InputError("'labels' must be an array of strings");
        table.labels.push_back(l.get<std::string>());
      }
    }
    table.validate();
    ProblemInput in = from_table(table, "table");
    read_settings(doc, in);
    return in;
  }

  ProblemInput in;
  in.name = "input";
  const Vector s = json_vector(member(doc, "s_n"), "s_n");
  const Matrix sigma = json_matrix(member(doc, "sigma_n"), "sigma_n");
  const long n = json_count(member(doc, "n"), "n");
  const Index m = s.size();
  if (sigma.rows() != m || sigma.cols() != m) {
    throw InputError("'sigma_n' must be " + std::to_string(m) + "x" + std::to_string(m) + " to match 's_n'");
  }
  if (n < 1) throw InputError("'n' must be positive");

  in.echo = Json::object();
  in.echo["s_n"] = to_json(s);
  in.echo["sigma_n"] = to_json(sigma);
  in.echo["n"] = n;
  if (doc.contains("restriction") == doc.contains("order")) {
    throw InputError("exactly one of 'restriction' and 'order' is required");
  }
  if (doc.contains("restriction")) {
    const Matrix r = json_matrix(doc.at("restriction"), "restriction");
    if (r.cols() != m) throw InputError("'restriction' must have " + std::to_string(m) + " columns");
    in.cone = ConeSpec::polyhedral(r);
    in.echo["restriction"] = to_json(r);
  } else {
    in.cone = parse_order(doc.at("order"), m);
    in.echo["order"] = doc.at("order");
  }
  if (doc.contains("null_basis")) {
    const Matrix b = json_matrix(doc.at("null_basis"), "null_basis");
    if (b.cols() != m) throw InputError("'null_basis' vectors must have length " + std::to_string(m));
    in.sub = LinearSubspace::from_basis(b.transpose(), m);
    in.echo["null_basis"] = to_json(b);
  } else {
    in.sub = in.cone->lineality();
  }
  check_nested(*in.sub, *in.cone);
  // Metric construction reports non-SPD covariances as numeric errors.
  in.stat = Statistic(s, Metric(sigma), n);
  read_settings(doc, in);
  return in;
}

ProblemInput builtin_case(const std::string& name) {
  if (name == "silvapulle") {
    SilvapulleCase c = silvapulle_case();
    ProblemInput in;
    in.name = name;
    in.echo = Json::object();
    in.echo["s_n"] = to_json(c.stat.s_n);
    in.echo["sigma_n"] = to_json(c.stat.sigma_n.sigma());
    in.echo["n"] = c.stat.n;
    in.echo["order"] = "orthant";
    in.stat = c.stat;
    in.sub = c.null_space;
    in.cone = c.cone;
    return in;
  }
  if (name == "cs-table5") return from_table(cs_table5(), name);
  if (name == "cs-table6") return from_table(cs_table6(), name);
  if (name == "cs-table5-doubled") return from_table(doubled_table(cs_table5()), name);
  throw InputError("unknown case '" + name + "' (expected silvapulle, cs-table5, cs-table6, cs-table5-doubled)");
}

}  // namespace ortest::cli
