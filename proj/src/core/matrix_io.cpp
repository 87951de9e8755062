#include "zfprob/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace zfprob {
namespace {

std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r'; };
  while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view token, std::size_t line, std::size_t column) {
  token = trim(token);
  if (token.empty()) throw ParseError(line, column, "empty field");
  if (token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError(line, column, "not a number: '" + std::string(token) + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError(line, column, "non-finite value '" + std::string(token) + "'");
  }
  return value;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::FileNotFound, path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

DenseMatrix parse_matrix_csv(std::string_view text) {
  std::vector<double> entries;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t line_no = 0;

  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (trim(line).empty()) continue;

    std::size_t fields = 0;
    while (true) {
      const auto comma = line.find(',');
      entries.push_back(parse_number(line.substr(0, comma), line_no, fields + 1));
      ++fields;
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (rows == 0) {
      cols = fields;
    } else if (fields != cols) {
      throw ParseError(line_no, std::min(fields, cols) + 1,
                       "expected " + std::to_string(cols) + " fields, found " +
                           std::to_string(fields));
    }
    ++rows;
  }
  if (rows == 0) throw ParseError(line_no, 0, "no data rows");
  return DenseMatrix::from_row_major(rows, cols, std::move(entries));
}

DenseMatrix load_matrix_csv(const std::filesystem::path& path) {
  return parse_matrix_csv(read_file(path));
}

RealVector load_vector_csv(const std::filesystem::path& path) {
  const DenseMatrix m = parse_matrix_csv(read_file(path));
  if (m.cols() != 1 && m.rows() != 1) {
    throw Error(Errc::DimensionMismatch, path.string() + " is not a vector");
  }
  return RealVector(m.data().begin(), m.data().end());
}

std::string format_matrix_csv(const DenseMatrix& m) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace zfprob
