#pragma once

#include <cstddef>

// Every numeric threshold used by the library lives here so tests and
// reports can refer to them by name.
namespace zfprob::tol {

/// ‖Q1ᵀQ1 − I‖_F bound for a QR factorization.
inline constexpr double kOrthonormality = 1e-10;
/// Relative Frobenius bound on ‖Q1·R − A‖ / ‖A‖.
inline constexpr double kQrReconstruction = 1e-10;
/// A pivot |r_ii| below kRank × (largest column norm) means rank deficiency.
inline constexpr double kRank = 1e-12;
/// Absolute threshold below which a triangular diagonal entry counts as zero.
inline constexpr double kPivot = 1e-14;
/// Relative bound on ‖Q̄ᵀ R Z − R̄‖_F / ‖R‖_F for a reduction result.
inline constexpr double kReductionReconstruction = 1e-9;
/// Relative bound on ||det R̄| − |det R|| / |det R|.
inline constexpr double kDeterminant = 1e-9;
/// Slack for the size-reduced and Lovász boundary comparisons.
inline constexpr double kBoundarySlack = 1e-12;
/// Candidates in SQRD / V-BLAST ordering closer than this tie.
inline constexpr double kOrderingTie = 1e-12;
/// Off-diagonal magnitude tolerated by the diagonal closed form.
inline constexpr double kDiagonal = 1e-14;
/// Agreement between a reported residual and its recomputation.
inline constexpr double kResidual = 1e-12;

/// Smallest error bound a quadrature estimate will report (round-off floor).
inline constexpr double kQuadratureFloor = 1e-12;
/// Smallest target accuracy accepted by the quadrature estimator.
inline constexpr double kMinQuadratureTarget = 1e-8;
/// Default quadrature target used by experiments.
inline constexpr double kDefaultQuadratureTarget = 1e-8;
inline constexpr std::size_t kGaussLegendreNodes = 32;
inline constexpr std::size_t kQuadratureEvaluationCap = 10'000'000;
inline constexpr std::size_t kMaxQuadratureDimension = 4;

inline constexpr std::size_t kMaxBruteForceDimension = 6;
inline constexpr int kDefaultBoxRadius = 3;
inline constexpr std::size_t kMinSamples = 1000;

/// Default LLL iteration cap is kIterationsPerSquaredDim · n².
inline constexpr std::size_t kIterationsPerSquaredDim = 10'000;

}  // namespace zfprob::tol
