#pragma once

// Serialization shared by the command-line tools: JSON matrices, CSV tables
// and file access with path context in every error.

#include "qxform/fock.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace qxform {

using Json = nlohmann::json;

// {"dim": N, "entries": [[re, im], ...]} row-major.
Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

// Shortest text that reads back to the same double.
std::string format_number(double x);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Header line first; an empty table is header-only.
  std::string to_csv() const;
};

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

// Inline JSON when the argument starts with '{' or '[', otherwise a file path.
Json load_json(const std::string& inline_or_path);

// Relative paths land in $QXFORM_OUT when it is set.
std::filesystem::path resolve_output(const std::filesystem::path& path);

}  // namespace qxform
