#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace zfprob {

enum class Errc {
  InvalidArgument,
  DimensionMismatch,
  RankDeficient,
  SingularMatrix,
  SingularDiagonal,
  NotDiagonal,
  NotUnimodular,
  IterationLimitExceeded,
  DimensionTooLarge,
  NoConvergence,
  Overflow,
  FileNotFound,
  ParseError,
  InvalidGrid,
};

std::string_view to_string(Errc code) noexcept;

/// Single exception type for every library failure; `code()` tells them apart.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Malformed CSV input, with 1-based line and field positions.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace zfprob
