#include "ortest_cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <system_error>

#include <fmt/format.h>

#include "ortest/error.hpp"

namespace ortest::cli {
namespace {

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  // Shortest representation that parses back to the same double.
  std::string s = fmt::format("{}", v);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

bool is_scalar(const Json& j) { return !j.is_object() && !j.is_array(); }

void emit(const Json& j, std::string& out, int depth) {
  const std::string pad(2 * static_cast<std::size_t>(depth + 1), ' ');
  const std::string close(2 * static_cast<std::size_t>(depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        emit(it.value(), out, depth + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), is_scalar);
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad;
        emit(e, out, depth + 1);
      }
      out += flat ? "]" : "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string dump_report(const Json& doc) {
  std::string out;
  emit(doc, out, 0);
  out += "\n";
  return out;
}

void check_output_path(const std::filesystem::path& path) {
  const auto parent = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  std::error_code ec;
  if (!std::filesystem::is_directory(parent, ec)) {
    throw ContractError("output directory does not exist: " + parent.string());
  }
  if (std::filesystem::is_directory(path, ec)) {
    throw ContractError("output path is a directory: " + path.string());
  }
}

void write_atomically(const std::filesystem::path& path, const std::string& text) {
  check_output_path(path);
  std::filesystem::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ContractError("cannot open output file: " + tmp.string());
    os << text;
    os.flush();
    if (!os) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw ContractError("failed writing output file: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace ortest::cli
