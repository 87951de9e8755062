#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>

#include "zfprob/matrix.hpp"

// Lattice reductions of an upper-triangular R: Q̄ᵀ R Z = R̄ with Z unimodular.
//
// Column indices are 0-based throughout. An adjacent pair is named by the
// index k of its second column, so the pair is (k−1, k) and 1 ≤ k < n.
namespace zfprob {

struct ReductionStats {
  std::size_t size_reductions = 0;  ///< size reductions with a nonzero multiplier
  std::size_t swaps = 0;            ///< column exchanges
  std::size_t iterations = 0;       ///< passes of the main loop

  friend bool operator==(const ReductionStats&, const ReductionStats&) = default;
};

struct LLLParams {
  double delta = 0.75;              ///< Lovász parameter, 1/4 < delta ≤ 1
  std::size_t max_iterations = 0;   ///< 0 selects 10000·n²

  void validate() const;
};

struct ReductionResult {
  DenseMatrix r_input;  ///< the triangular factor the reduction started from
  DenseMatrix r_bar;    ///< reduced, upper triangular, positive diagonal
  IntMatrix z;          ///< unimodular
  DenseMatrix q_bar;    ///< orthogonal, q_barᵀ · r_input · z = r_bar
  ReductionStats stats;
};

struct SizeReduceOutcome {
  DenseMatrix r;
  IntMatrix z;
  std::int64_t multiplier = 0;
  bool applied = false;
};

/// Subtracts round(r_ik / r_ii) times column i from column k of r and z.
/// Throws SingularDiagonal if |r_ii| is below the pivot threshold.
SizeReduceOutcome size_reduce_entry(DenseMatrix r, IntMatrix z, std::size_t i,
                                    std::size_t k);

/// delta · r²_{k−1,k−1} ≤ r²_{k−1,k} + r²_{kk}
bool lovasz_holds(const DenseMatrix& r, std::size_t k, double delta);

struct SwapOutcome {
  DenseMatrix r;
  IntMatrix z;
  DenseMatrix q;
};

/// Exchanges columns k−1 and k, restores triangular form with one Givens
/// rotation (accumulated into q) and renormalizes the diagonal signs.
SwapOutcome swap_and_retriangularize(DenseMatrix r, IntMatrix z, DenseMatrix q,
                                     std::size_t k);

/// The textbook LLL loop on a triangular factor. Throws IterationLimitExceeded.
ReductionResult lll_reduce(const DenseMatrix& r, const LLLParams& params = {});

struct LLLCheck {
  bool size_ok = true;
  bool lovasz_ok = true;
  /// First offending pair (i, k): a size violation at r_ik, or a Lovász
  /// violation reported as (k−1, k). Scanned column by column.
  std::optional<std::pair<std::size_t, std::size_t>> first_violation;

  bool ok() const noexcept { return size_ok && lovasz_ok; }
};

LLLCheck is_lll_reduced(const DenseMatrix& r, double delta);

/// Sorted QR: column k of R̄ is the remaining column with the smallest |r̄_kk|.
/// `a` may be any full-rank m×n matrix; it is QR-factorized first.
ReductionResult sqrd(const DenseMatrix& a);

/// V-BLAST ordering: columns fixed last to first, each maximizing |r̄_kk|.
ReductionResult vblast(const DenseMatrix& r);

/// (∏ ‖column k‖₂) / |det r| for upper-triangular r. Throws SingularMatrix.
double orthogonality_defect(const DenseMatrix& r);

bool is_permutation(const IntMatrix& z);

/// Numerical audit of the ReductionResult invariants.
struct ReductionAudit {
  std::int64_t det_z = 0;
  double reconstruction_error = 0.0;  ///< ‖Q̄ᵀRZ − R̄‖_F / ‖R‖_F
  double determinant_error = 0.0;     ///< relative change of |det|
  double orthogonality_error = 0.0;   ///< ‖Q̄ᵀQ̄ − I‖_F
  bool triangular = false;
  bool positive_diagonal = false;

  bool unimodular() const noexcept { return det_z == 1 || det_z == -1; }
  bool ok() const noexcept;
};

ReductionAudit audit_reduction(const ReductionResult& result);

}  // namespace zfprob
