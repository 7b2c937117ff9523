#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

namespace ortest::cli {

using Json = nlohmann::ordered_json;

/// Serializes with two-space indentation; doubles use 17 significant digits
/// and always carry a decimal point or exponent so they parse back as
/// doubles. Arrays of scalars stay on one line. Parsing the output and
/// serializing again reproduces it byte for byte.
std::string dump_report(const Json& doc);

/// Writes to a sibling temporary file and renames it into place, so an
/// interrupted run never leaves a partial file.
void write_atomically(const std::filesystem::path& path, const std::string& text);

/// Throws ContractError unless the parent directory of `path` exists.
void check_output_path(const std::filesystem::path& path);

}  // namespace ortest::cli
