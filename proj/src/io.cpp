#include "qxform/io.hpp"

#include "qxform/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace qxform {

Json matrix_to_json(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) fail(ErrorKind::InvalidDimension, "only square matrices are serialized");
  Json entries = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) entries.push_back({m(i, j).real(), m(i, j).imag()});
  return Json{{"dim", m.rows()}, {"entries", std::move(entries)}};
}

ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("entries"))
    fail(ErrorKind::Parameter, "matrix needs \"dim\" and \"entries\"");
  if (!j["dim"].is_number_unsigned()) fail(ErrorKind::Parameter, "matrix dim must be a non-negative integer");
  const auto n = j["dim"].get<std::size_t>();
  const Json& e = j["entries"];
  if (n == 0 || n > kMaxDim) fail(ErrorKind::InvalidDimension, "matrix dim out of range");
  if (!e.is_array() || e.size() != n * n)
    fail(ErrorKind::InvalidDimension, "matrix entries must hold dim^2 = " + std::to_string(n * n) + " pairs");
  ComplexMatrix m(n, n);
  for (std::size_t k = 0; k < n * n; ++k) {
    const Json& z = e[k];
    if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
      fail(ErrorKind::Parameter, "matrix entry " + std::to_string(k) + " must be [re, im]");
    m(k / n, k % n) = cplx{z[0].get<double>(), z[1].get<double>()};
  }
  return m;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return {buf.data(), end};
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_number(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorKind::Io, "error reading " + path.string());
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorKind::Io, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) fail(ErrorKind::Io, "error writing " + path.string());
}

Json load_json(const std::string& inline_or_path) {
  const auto first = inline_or_path.find_first_not_of(" \t\r\n");
  const bool is_inline = first != std::string::npos && (inline_or_path[first] == '{' || inline_or_path[first] == '[');
  const std::string text = is_inline ? inline_or_path : read_text(inline_or_path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::Io, (is_inline ? std::string("inline JSON") : inline_or_path) + ": " + e.what());
  }
}

std::filesystem::path resolve_output(const std::filesystem::path& path) {
  if (path.is_absolute()) return path;
  if (const char* dir = std::getenv("QXFORM_OUT"); dir && *dir) return std::filesystem::path(dir) / path;
  return path;
}

}  // namespace qxform
