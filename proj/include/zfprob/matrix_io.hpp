#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "zfprob/matrix.hpp"

namespace zfprob {

// Plain-text CSV: one matrix row per line, decimal numbers, no header.
// Vectors are single-column CSV (one entry per line).

DenseMatrix parse_matrix_csv(std::string_view text);
DenseMatrix load_matrix_csv(const std::filesystem::path& path);

/// Reads a single-column CSV; a single row of values is accepted too.
RealVector load_vector_csv(const std::filesystem::path& path);

std::string format_matrix_csv(const DenseMatrix& m);

}  // namespace zfprob
