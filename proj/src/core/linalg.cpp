#include "zfprob/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "zfprob/tolerances.hpp"

namespace zfprob {

QRFactorization qr_factorize(const DenseMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (n == 0) throw Error(Errc::InvalidArgument, "matrix has no columns");
  if (m < n) {
    throw Error(Errc::DimensionMismatch, "QR needs rows >= cols, got " +
                                             std::to_string(m) + "x" + std::to_string(n));
  }

  double largest_column = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    largest_column = std::max(largest_column, norm2(a.column(j)));
  }
  if (largest_column == 0.0) throw Error(Errc::RankDeficient, "zero matrix");

  DenseMatrix w = a;
  DenseMatrix q = DenseMatrix::identity(m);
  std::vector<double> v(m);

  for (std::size_t k = 0; k < n; ++k) {
    double below = 0.0;
    for (std::size_t i = k + 1; i < m; ++i) below += w(i, k) * w(i, k);
    if (below > 0.0) {
      const double norm_x = std::sqrt(below + w(k, k) * w(k, k));
      const double alpha = -std::copysign(norm_x, w(k, k));
      const std::size_t len = m - k;
      for (std::size_t i = 0; i < len; ++i) v[i] = w(k + i, k);
      v[0] -= alpha;
      double vv = 0.0;
      for (std::size_t i = 0; i < len; ++i) vv += v[i] * v[i];

      for (std::size_t j = k; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < len; ++i) s += v[i] * w(k + i, j);
        s *= 2.0 / vv;
        for (std::size_t i = 0; i < len; ++i) w(k + i, j) -= s * v[i];
      }
      for (std::size_t r = 0; r < m; ++r) {
        double s = 0.0;
        for (std::size_t i = 0; i < len; ++i) s += q(r, k + i) * v[i];
        s *= 2.0 / vv;
        for (std::size_t i = 0; i < len; ++i) q(r, k + i) -= s * v[i];
      }
      w(k, k) = alpha;
      for (std::size_t i = k + 1; i < m; ++i) w(i, k) = 0.0;
    }
    if (std::abs(w(k, k)) <= tol::kRank * largest_column) {
      throw Error(Errc::RankDeficient,
                  "pivot " + std::to_string(k) + " below rank tolerance");
    }
    if (w(k, k) < 0.0) {
      for (std::size_t j = k; j < n; ++j) w(k, j) = -w(k, j);
      for (std::size_t r = 0; r < m; ++r) q(r, k) = -q(r, k);
    }
  }

  QRFactorization out{DenseMatrix(m, n), std::nullopt, DenseMatrix(n, n)};
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out.q1(i, j) = q(i, j);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) out.r(i, j) = w(i, j);
  if (m > n) {
    DenseMatrix q2(m, m - n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = n; j < m; ++j) q2(i, j - n) = q(i, j);
    out.q2 = std::move(q2);
  }
  return out;
}

std::int64_t round_nearest(double x) {
  // 2^62 keeps every integer exactly representable and leaves headroom for
  // the caller's arithmetic.
  constexpr double kLimit = 4611686018427387904.0;
  if (!std::isfinite(x) || std::abs(x) >= kLimit) {
    throw Error(Errc::InvalidArgument, "cannot round " + std::to_string(x));
  }
  const double lower = std::floor(x);
  const double frac = x - lower;  // exact for doubles
  double nearest;
  if (frac < 0.5) {
    nearest = lower;
  } else if (frac > 0.5) {
    nearest = lower + 1.0;
  } else {
    nearest = std::trunc(x);  // the tie candidate closer to zero
  }
  return static_cast<std::int64_t>(nearest);
}

IntVector round_nearest(std::span<const double> x) {
  IntVector out(x.size());
  std::transform(x.begin(), x.end(), out.begin(),
                 [](double v) { return round_nearest(v); });
  return out;
}

RealVector back_substitute(const DenseMatrix& r, std::span<const double> b) {
  const std::size_t n = r.rows();
  if (!r.is_square() || b.size() != n) {
    throw Error(Errc::DimensionMismatch, "back_substitute dimensions disagree");
  }
  RealVector x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    if (std::abs(r(ii, ii)) < tol::kPivot) {
      throw Error(Errc::SingularMatrix, "zero diagonal at " + std::to_string(ii));
    }
    double s = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= r(ii, j) * x[j];
    x[ii] = s / r(ii, ii);
  }
  return x;
}

double det_upper_triangular(const DenseMatrix& r) {
  if (!r.is_square()) throw Error(Errc::DimensionMismatch, "determinant of non-square");
  double d = 1.0;
  for (std::size_t i = 0; i < r.rows(); ++i) d *= r(i, i);
  return d;
}

namespace {

using Wide = __int128;

constexpr Wide kInt64Max = std::numeric_limits<std::int64_t>::max();

std::int64_t narrow(Wide v) {
  if (v > kInt64Max || v < -kInt64Max) {
    throw Error(Errc::Overflow, "integer result leaves 64-bit range");
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace

std::int64_t exact_determinant(const IntMatrix& z) {
  if (!z.is_square()) throw Error(Errc::DimensionMismatch, "determinant of non-square");
  const std::size_t n = z.rows();
  if (n == 0) return 1;
  std::vector<std::vector<Wide>> m(n, std::vector<Wide>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i][j] = z(i, j);

  int sign = 1;
  Wide previous = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t p = k + 1;
      while (p < n && m[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(m[k], m[p]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        // Bareiss: the division is exact.
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / previous;
        narrow(m[i][j]);
      }
      m[i][k] = 0;
    }
    previous = m[k][k];
  }
  return narrow(sign * m[n - 1][n - 1]);
}

IntMatrix unimodular_inverse(const IntMatrix& z) {
  if (!z.is_square()) throw Error(Errc::NotUnimodular, "non-square transform");
  const std::int64_t det = exact_determinant(z);
  if (det != 1 && det != -1) {
    throw Error(Errc::NotUnimodular, "determinant is " + std::to_string(det));
  }
  const std::size_t n = z.rows();

  // Gauss-Jordan in floating point, then round and confirm Z·Z⁻¹ = I exactly.
  DenseMatrix a = to_dense(z);
  DenseMatrix inv = DenseMatrix::identity(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(a(k, j), a(p, j));
      std::swap(inv(k, j), inv(p, j));
    }
    const double pivot = a(k, k);
    for (std::size_t j = 0; j < n; ++j) {
      a(k, j) /= pivot;
      inv(k, j) /= pivot;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || a(i, k) == 0.0) continue;
      const double f = a(i, k);
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) -= f * a(k, j);
        inv(i, j) -= f * inv(k, j);
      }
    }
  }
  IntMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = round_nearest(inv(i, j));

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Wide s = 0;
      for (std::size_t k = 0; k < n; ++k) s += Wide{z(i, k)} * out(k, j);
      if (s != (i == j ? 1 : 0)) {
        throw Error(Errc::NotUnimodular, "inverse is not integral within range");
      }
    }
  }
  return out;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw Error(Errc::DimensionMismatch, "matrix product");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

RealVector multiply(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw Error(Errc::DimensionMismatch, "matrix-vector product");
  RealVector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

RealVector multiply(const DenseMatrix& a, std::span<const std::int64_t> x) {
  RealVector xr(x.begin(), x.end());
  return multiply(a, std::span<const double>(xr));
}

IntVector multiply(const IntMatrix& a, std::span<const std::int64_t> x) {
  if (a.cols() != x.size()) throw Error(Errc::DimensionMismatch, "matrix-vector product");
  IntVector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Wide s = 0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += Wide{a(i, j)} * x[j];
    y[i] = narrow(s);
  }
  return y;
}

DenseMatrix to_dense(const IntMatrix& z) {
  DenseMatrix d(z.rows(), z.cols());
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t j = 0; j < z.cols(); ++j) d(i, j) = static_cast<double>(z(i, j));
  return d;
}

double frobenius_norm(const DenseMatrix& a) { return norm2(a.data()); }

double frobenius_distance(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(Errc::DimensionMismatch, "frobenius_distance shapes differ");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double norm2(std::span<const double> x) {
  double scale = 0.0;
  for (const double v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (const double v : x) s += (v / scale) * (v / scale);
  return scale * std::sqrt(s);
}

bool is_upper_triangular(const DenseMatrix& r, double tolerance) {
  if (!r.is_square()) return false;
  for (std::size_t i = 1; i < r.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(r(i, j)) > tolerance) return false;
  return true;
}

}  // namespace zfprob
