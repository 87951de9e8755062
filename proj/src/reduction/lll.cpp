#include <cmath>
#include <string>

#include "zfprob/linalg.hpp"
#include "zfprob/reduction.hpp"
#include "zfprob/tolerances.hpp"

namespace zfprob {
namespace {

void require_pair(const DenseMatrix& r, std::size_t k) {
  if (k == 0 || k >= r.cols()) {
    throw Error(Errc::InvalidArgument, "column pair index " + std::to_string(k) +
                                           " outside [1, " + std::to_string(r.cols()) + ")");
  }
}

std::int64_t size_reduce_in_place(DenseMatrix& r, IntMatrix& z, std::size_t i,
                                  std::size_t k) {
  if (std::abs(r(i, i)) < tol::kPivot) {
    throw Error(Errc::SingularDiagonal, "r_" + std::to_string(i) + std::to_string(i));
  }
  const std::int64_t mu = round_nearest(r(i, k) / r(i, i));
  if (mu == 0) return 0;
  const double m = static_cast<double>(mu);
  for (std::size_t row = 0; row <= i; ++row) r(row, k) -= m * r(row, i);
  for (std::size_t row = 0; row < z.rows(); ++row) {
    std::int64_t step = 0;
    if (__builtin_mul_overflow(mu, z(row, i), &step) ||
        __builtin_sub_overflow(z(row, k), step, &z(row, k))) {
      throw Error(Errc::Overflow, "unimodular transform left the 64-bit range");
    }
  }
  return mu;
}

void swap_in_place(DenseMatrix& r, IntMatrix& z, DenseMatrix& q, std::size_t k) {
  const std::size_t n = r.cols();
  r.swap_columns(k - 1, k);
  z.swap_columns(k - 1, k);

  const double a = r(k - 1, k - 1);
  const double b = r(k, k - 1);
  const double h = std::hypot(a, b);
  const double c = a / h;
  const double s = b / h;
  for (std::size_t j = k; j < n; ++j) {
    const double x = r(k - 1, j);
    const double y = r(k, j);
    r(k - 1, j) = c * x + s * y;
    r(k, j) = -s * x + c * y;
  }
  r(k - 1, k - 1) = h;
  r(k, k - 1) = 0.0;
  for (std::size_t i = 0; i < q.rows(); ++i) {
    const double x = q(i, k - 1);
    const double y = q(i, k);
    q(i, k - 1) = c * x + s * y;
    q(i, k) = -s * x + c * y;
  }
  if (r(k, k) < 0.0) {
    for (std::size_t j = k; j < n; ++j) r(k, j) = -r(k, j);
    for (std::size_t i = 0; i < q.rows(); ++i) q(i, k) = -q(i, k);
  }
}

void require_triangular_positive(const DenseMatrix& r) {
  if (!is_upper_triangular(r)) {
    throw Error(Errc::InvalidArgument, "expected a square upper-triangular matrix");
  }
  for (std::size_t i = 0; i < r.rows(); ++i) {
    if (!(r(i, i) > 0.0)) {
      throw Error(Errc::InvalidArgument, "diagonal must be positive");
    }
  }
}

}  // namespace

void LLLParams::validate() const {
  if (!(delta > 0.25 && delta <= 1.0)) {
    throw Error(Errc::InvalidArgument,
                "delta must lie in (0.25, 1], got " + std::to_string(delta));
  }
}

SizeReduceOutcome size_reduce_entry(DenseMatrix r, IntMatrix z, std::size_t i,
                                    std::size_t k) {
  if (!(i < k && k < r.cols()) || z.cols() != r.cols()) {
    throw Error(Errc::InvalidArgument, "size reduction needs i < k < n");
  }
  const std::int64_t mu = size_reduce_in_place(r, z, i, k);
  return {std::move(r), std::move(z), mu, mu != 0};
}

bool lovasz_holds(const DenseMatrix& r, std::size_t k, double delta) {
  require_pair(r, k);
  const double above = r(k - 1, k - 1);
  return delta * above * above <= r(k - 1, k) * r(k - 1, k) + r(k, k) * r(k, k);
}

SwapOutcome swap_and_retriangularize(DenseMatrix r, IntMatrix z, DenseMatrix q,
                                     std::size_t k) {
  require_pair(r, k);
  if (z.cols() != r.cols() || q.cols() != r.rows()) {
    throw Error(Errc::DimensionMismatch, "swap bookkeeping matrices disagree with r");
  }
  swap_in_place(r, z, q, k);
  return {std::move(r), std::move(z), std::move(q)};
}

ReductionResult lll_reduce(const DenseMatrix& r, const LLLParams& params) {
  params.validate();
  require_triangular_positive(r);
  const std::size_t n = r.cols();
  const std::size_t limit = params.max_iterations != 0
                                ? params.max_iterations
                                : tol::kIterationsPerSquaredDim * n * n;

  ReductionResult out{r, r, IntMatrix::identity(n), DenseMatrix::identity(n), {}};
  DenseMatrix& w = out.r_bar;
  ReductionStats& stats = out.stats;

  std::size_t k = 1;
  while (k < n) {
    if (++stats.iterations > limit) {
      throw Error(Errc::IterationLimitExceeded,
                  "LLL exceeded " + std::to_string(limit) + " iterations");
    }
    if (size_reduce_in_place(w, out.z, k - 1, k) != 0) ++stats.size_reductions;

    if (!lovasz_holds(w, k, params.delta)) {
      swap_in_place(w, out.z, out.q_bar, k);
      ++stats.swaps;
      if (k > 1) --k;
    } else {
      for (std::size_t i = k - 1; i-- > 0;) {
        if (size_reduce_in_place(w, out.z, i, k) != 0) ++stats.size_reductions;
      }
      ++k;
    }
  }
  return out;
}

LLLCheck is_lll_reduced(const DenseMatrix& r, double delta) {
  if (!is_upper_triangular(r)) {
    throw Error(Errc::InvalidArgument, "expected a square upper-triangular matrix");
  }
  LLLCheck check;
  const auto note = [&check](std::size_t i, std::size_t k) {
    if (!check.first_violation) check.first_violation = std::pair{i, k};
  };
  for (std::size_t k = 1; k < r.cols(); ++k) {
    for (std::size_t i = 0; i < k; ++i) {
      const double half = 0.5 * std::abs(r(i, i));
      if (std::abs(r(i, k)) > half * (1.0 + tol::kBoundarySlack)) {
        check.size_ok = false;
        note(i, k);
      }
    }
    const double lhs = delta * r(k - 1, k - 1) * r(k - 1, k - 1);
    const double rhs = r(k - 1, k) * r(k - 1, k) + r(k, k) * r(k, k);
    if (lhs > rhs + tol::kBoundarySlack * lhs) {
      check.lovasz_ok = false;
      note(k - 1, k);
    }
  }
  return check;
}

}  // namespace zfprob
