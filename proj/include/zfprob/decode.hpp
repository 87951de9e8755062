#pragma once

#include <optional>
#include <string_view>

#include "zfprob/matrix.hpp"
#include "zfprob/reduction.hpp"

namespace zfprob {

/// min over integer x of ‖y_tilde − r·x‖₂ with y_tilde ~ N(r·x_true, σ² I).
struct ILSInstance {
  DenseMatrix r;        ///< n×n upper triangular, positive diagonal
  RealVector y_tilde;   ///< rotated observation Q1ᵀy
  double sigma = 1.0;
  std::optional<IntVector> x_true;

  void validate() const;
};

enum class DecoderKind { ZF, SIC, BruteForce };

std::string_view to_string(DecoderKind kind) noexcept;

struct DecodeResult {
  IntVector estimate;
  double residual = 0.0;  ///< ‖y_tilde − r·estimate‖₂
  DecoderKind decoder = DecoderKind::ZF;
};

double residual_norm(const DenseMatrix& r, std::span<const double> y,
                     std::span<const std::int64_t> x);

/// Babai rounding: round(r⁻¹ y_tilde).
DecodeResult zf_decode(const ILSInstance& inst);

/// Babai nearest plane: coordinates decided last to first.
DecodeResult sic_decode(const ILSInstance& inst);

/// Z · estimate. Throws NotUnimodular unless |det Z| = 1.
IntVector lift_estimate(const IntMatrix& z, std::span<const std::int64_t> estimate);

/// Exhaustive search of the box of half-width `box_radius` around the ZF
/// estimate; ties go to the lexicographically smallest vector.
/// Throws DimensionTooLarge for n > 6.
DecodeResult ils_brute_force(const ILSInstance& inst, int box_radius = 3);

/// Flips rows with a negative diagonal entry in both r and y_tilde.
ILSInstance normalize_signs(ILSInstance inst);

/// The instance seen after a reduction: (R̄, Q̄ᵀỹ), with x_true mapped to Z⁻¹x_true.
ILSInstance reduce_instance(const ILSInstance& inst, const ReductionResult& reduction);

}  // namespace zfprob
