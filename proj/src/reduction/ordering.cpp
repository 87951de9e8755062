#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "zfprob/linalg.hpp"
#include "zfprob/reduction.hpp"
#include "zfprob/tolerances.hpp"

namespace zfprob {
namespace {

IntMatrix permutation_matrix(const std::vector<std::size_t>& order) {
  const std::size_t n = order.size();
  IntMatrix z(n, n);
  for (std::size_t k = 0; k < n; ++k) z(order[k], k) = 1;
  return z;
}

DenseMatrix select_columns(const DenseMatrix& r, const std::vector<std::size_t>& order) {
  DenseMatrix out(r.rows(), order.size());
  for (std::size_t k = 0; k < order.size(); ++k)
    for (std::size_t i = 0; i < r.rows(); ++i) out(i, k) = r(i, order[k]);
  return out;
}

std::size_t count_displaced(const std::vector<std::size_t>& order) {
  std::size_t moved = 0;
  for (std::size_t k = 0; k < order.size(); ++k) moved += order[k] != k;
  return moved;
}

}  // namespace

ReductionResult sqrd(const DenseMatrix& a) {
  const DenseMatrix r = qr_factorize(a).r;
  const std::size_t n = r.cols();

  // Householder QR with greedy minimum-norm pivoting on the trailing block.
  DenseMatrix w = r;
  DenseMatrix q = DenseMatrix::identity(n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> v(n);
  std::size_t swaps = 0;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t best = k;
    double best_norm = 0.0;
    for (std::size_t j = k; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < n; ++i) s += w(i, j) * w(i, j);
      const double norm = std::sqrt(s);
      if (j == k) {
        best_norm = norm;
        continue;
      }
      const double tie = tol::kOrderingTie * std::max(1.0, best_norm);
      if (norm < best_norm - tie ||
          (std::abs(norm - best_norm) <= tie && order[j] < order[best])) {
        best = j;
        best_norm = norm;
      }
    }
    if (best != k) {
      w.swap_columns(k, best);
      std::swap(order[k], order[best]);
      ++swaps;
    }

    double below = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) below += w(i, k) * w(i, k);
    if (below > 0.0) {
      const double alpha = -std::copysign(std::sqrt(below + w(k, k) * w(k, k)), w(k, k));
      const std::size_t len = n - k;
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
      for (std::size_t row = 0; row < n; ++row) {
        double s = 0.0;
        for (std::size_t i = 0; i < len; ++i) s += q(row, k + i) * v[i];
        s *= 2.0 / vv;
        for (std::size_t i = 0; i < len; ++i) q(row, k + i) -= s * v[i];
      }
      w(k, k) = alpha;
      for (std::size_t i = k + 1; i < n; ++i) w(i, k) = 0.0;
    }
    if (w(k, k) < 0.0) {
      for (std::size_t j = k; j < n; ++j) w(k, j) = -w(k, j);
      for (std::size_t row = 0; row < n; ++row) q(row, k) = -q(row, k);
    }
  }

  ReductionResult out{r, std::move(w), permutation_matrix(order), std::move(q), {}};
  out.stats.swaps = swaps;
  out.stats.iterations = n;
  return out;
}

ReductionResult vblast(const DenseMatrix& r) {
  if (!is_upper_triangular(r)) {
    throw Error(Errc::InvalidArgument, "vblast expects a square upper-triangular matrix");
  }
  const std::size_t n = r.cols();
  std::vector<std::size_t> remaining(n);
  std::iota(remaining.begin(), remaining.end(), std::size_t{0});
  std::vector<std::size_t> order(n);

  // Position k takes the candidate whose distance to the span of the other
  // remaining columns (the last diagonal of their QR) is largest.
  for (std::size_t k = n; k-- > 0;) {
    std::size_t best = 0;
    double best_diag = -1.0;
    for (std::size_t c = 0; c < remaining.size(); ++c) {
      std::vector<std::size_t> trial;
      trial.reserve(remaining.size());
      for (std::size_t j = 0; j < remaining.size(); ++j)
        if (j != c) trial.push_back(remaining[j]);
      trial.push_back(remaining[c]);
      const DenseMatrix f = qr_factorize(select_columns(r, trial)).r;
      const double diag = f(k, k);
      const double tie = tol::kOrderingTie * std::max(1.0, best_diag);
      // `remaining` is kept in ascending original order, so a tie keeps the
      // lower index already held in `best`.
      if (diag > best_diag + tie) {
        best = c;
        best_diag = diag;
      }
    }
    order[k] = remaining[best];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
  }

  QRFactorization f = qr_factorize(select_columns(r, order));
  ReductionResult out{r, std::move(f.r), permutation_matrix(order), std::move(f.q1), {}};
  out.stats.swaps = count_displaced(order);
  out.stats.iterations = n;
  return out;
}

double orthogonality_defect(const DenseMatrix& r) {
  if (!is_upper_triangular(r)) {
    throw Error(Errc::InvalidArgument, "expected a square upper-triangular matrix");
  }
  double det = 1.0;
  double product = 1.0;
  for (std::size_t k = 0; k < r.cols(); ++k) {
    if (std::abs(r(k, k)) < tol::kPivot) throw Error(Errc::SingularMatrix, "zero diagonal");
    det *= std::abs(r(k, k));
    product *= norm2(r.column(k));
  }
  return product / det;
}

bool is_permutation(const IntMatrix& z) {
  if (!z.is_square()) return false;
  const std::size_t n = z.rows();
  std::vector<int> row_hits(n, 0);
  std::vector<int> col_hits(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (z(i, j) == 1) {
        ++row_hits[i];
        ++col_hits[j];
      } else if (z(i, j) != 0) {
        return false;
      }
    }
  }
  return std::all_of(row_hits.begin(), row_hits.end(), [](int h) { return h == 1; }) &&
         std::all_of(col_hits.begin(), col_hits.end(), [](int h) { return h == 1; });
}

}  // namespace zfprob
