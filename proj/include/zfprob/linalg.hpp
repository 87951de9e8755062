#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "zfprob/matrix.hpp"

namespace zfprob {

/// A = [Q1 Q2] [R; 0] with r_ii > 0.
struct QRFactorization {
  DenseMatrix q1;                 ///< m×n, orthonormal columns
  std::optional<DenseMatrix> q2;  ///< m×(m−n) complement, present iff m > n
  DenseMatrix r;                  ///< n×n upper triangular, positive diagonal
};

/// Householder QR with the diagonal of R normalized positive.
/// Throws RankDeficient or DimensionMismatch (rows < cols).
QRFactorization qr_factorize(const DenseMatrix& a);

/// Nearest integer; an exact half-integer tie goes to the smaller magnitude.
std::int64_t round_nearest(double x);
IntVector round_nearest(std::span<const double> x);

/// Solves r·x = b for upper-triangular r. Throws SingularMatrix.
RealVector back_substitute(const DenseMatrix& r, std::span<const double> b);

/// Product of the diagonal entries.
double det_upper_triangular(const DenseMatrix& r);

/// Exact determinant of an integer matrix (fraction-free Bareiss elimination).
/// Throws Overflow if an intermediate leaves the 64-bit range.
std::int64_t exact_determinant(const IntMatrix& z);

/// Exact integer inverse of a unimodular matrix. Throws NotUnimodular.
IntMatrix unimodular_inverse(const IntMatrix& z);

// Small dense helpers.
DenseMatrix transpose(const DenseMatrix& a);
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
RealVector multiply(const DenseMatrix& a, std::span<const double> x);
RealVector multiply(const DenseMatrix& a, std::span<const std::int64_t> x);
IntVector multiply(const IntMatrix& a, std::span<const std::int64_t> x);
DenseMatrix to_dense(const IntMatrix& z);
double frobenius_norm(const DenseMatrix& a);
double frobenius_distance(const DenseMatrix& a, const DenseMatrix& b);
double norm2(std::span<const double> x);
bool is_upper_triangular(const DenseMatrix& r, double tolerance = 0.0);

}  // namespace zfprob
