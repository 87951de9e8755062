#pragma once

#include "zfprob/matrix.hpp"
#include "zfprob/probability.hpp"
#include "zfprob/report.hpp"
#include "zfprob/rng.hpp"

namespace zfprob {

/// Published reference instances and their printed 4-decimal values.
namespace reference {

inline constexpr double kTolerance = 5e-4;

/// Size reduction then LLL each raise P_ZF.
inline DenseMatrix gain_2x2() { return {{4.0, 9.0}, {0.0, 1.0}}; }
inline constexpr double kGainSigma = 0.5;
inline constexpr double kGainOriginal = 0.3413;
inline constexpr double kGainSizeReduced = 0.6825;
inline constexpr double kGainLll = 0.8388;

/// LLL raises the ZF residual.
inline DenseMatrix residual_2x2() { return {{1.0, 0.44}, {0.0, 0.28}}; }
inline RealVector residual_observation() { return {-0.7, -0.24}; }
inline constexpr double kResidualOriginal = 0.2631;
inline constexpr double kResidualLll = 0.3672;

/// LLL lowers P_ZF in three dimensions.
inline DenseMatrix loss_3x3() {
  return {{3.0, 1.5, 0.0}, {0.0, 3.0, -1.51}, {0.0, 0.0, 3.0}};
}
inline DenseMatrix loss_3x3_reduced() {
  return {{3.0, 1.5, 1.5}, {0.0, 3.0, 1.49}, {0.0, 0.0, 3.0}};
}
inline constexpr double kLossSigma = 1.0;
inline constexpr double kLossOriginal = 0.6105;
inline constexpr double kLossLll = 0.6030;

}  // namespace reference

/// diag(I_{n−k}, block) for a k×k block.
DenseMatrix embed_block(const DenseMatrix& block, std::size_t n);

/// P_ZF of a block-diagonal triangular matrix as the product of the leading
/// identity-like diagonal part (closed form) and the trailing block
/// (quadrature). Throws InvalidArgument if r does not split at `split`.
ProbabilityEstimate pzf_block_product(const DenseMatrix& r, std::size_t split, double sigma,
                                      double target_abs_error = tol::kDefaultQuadratureTarget);

/// Triangular factor of an m×n model matrix with i.i.d. N(0,1) entries.
DenseMatrix random_triangular(std::size_t m, std::size_t n, const RngSpec& spec);

ExperimentReport cmd_reproduce(const ExperimentConfig& config = {});
ExperimentReport cmd_reduce(const ExperimentConfig& config);
ExperimentReport cmd_decode(const ExperimentConfig& config);
ExperimentReport cmd_pzf(const ExperimentConfig& config);
ExperimentReport cmd_sweep_delta(const ExperimentConfig& config);
ExperimentReport cmd_invariance(const ExperimentConfig& config);
ExperimentReport cmd_ensemble(const ExperimentConfig& config);

/// Validates the config, dispatches on `command` and stamps the duration.
ExperimentReport run_command(const ExperimentConfig& config);

/// Writes the report to config.out_path (or stdout) in config.out_format.
void write_report(const ExperimentReport& report);

}  // namespace zfprob
