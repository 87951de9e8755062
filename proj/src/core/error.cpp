#include "zfprob/error.hpp"

namespace zfprob {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::SingularMatrix: return "SingularMatrix";
    case Errc::SingularDiagonal: return "SingularDiagonal";
    case Errc::NotDiagonal: return "NotDiagonal";
    case Errc::NotUnimodular: return "NotUnimodular";
    case Errc::IterationLimitExceeded: return "IterationLimitExceeded";
    case Errc::DimensionTooLarge: return "DimensionTooLarge";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::Overflow: return "Overflow";
    case Errc::FileNotFound: return "FileNotFound";
    case Errc::ParseError: return "ParseError";
    case Errc::InvalidGrid: return "InvalidGrid";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : Error(Errc::ParseError, "line " + std::to_string(line) + ", column " +
                                  std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

}  // namespace zfprob
