#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "zfprob/matrix.hpp"
#include "zfprob/rng.hpp"
#include "zfprob/tolerances.hpp"

// Success probability of the zero-forcing decoder,
//
//   P_ZF(R) = |det R| / (2πσ²)^{n/2} ∫_{[−½,½]ⁿ} exp(−‖Rξ‖² / 2σ²) dξ,
//
// by four independent routes that are expected to agree.
namespace zfprob {

enum class Method { Diagonal, Quadrature, MonteCarlo, Empirical };

std::string_view to_string(Method method) noexcept;
Method method_from_string(std::string_view name);

struct ProbabilityEstimate {
  double value = 0.0;
  Method method = Method::Quadrature;
  /// Absolute bound for Diagonal/Quadrature, one standard error otherwise.
  double error_bound = 0.0;
  std::uint64_t evaluations = 0;
  std::optional<std::uint64_t> seed;
};

double erf(double x);

/// ½[erf(hi) − erf(lo)] for lo ≤ hi, evaluated without cancellation in the tails.
double erf_window(double lo, double hi);

/// ∏ erf(r_ii / (2√2 σ)). Throws NotDiagonal.
ProbabilityEstimate pzf_diagonal(const DenseMatrix& r, double sigma);

/// Tensor Gauss–Legendre on n−1 coordinates; the remaining one is integrated
/// in closed form. Panels are bisected until successive refinements differ by
/// less than target_abs_error / 2. Throws DimensionTooLarge (n > 4) and
/// NoConvergence.
ProbabilityEstimate pzf_quadrature(const DenseMatrix& r, double sigma,
                                   double target_abs_error = tol::kDefaultQuadratureTarget);

/// Plain Monte Carlo over ξ uniform on the unit cube.
ProbabilityEstimate pzf_monte_carlo(const DenseMatrix& r, double sigma,
                                    std::uint64_t samples, const RngSpec& rng);

/// Simulated decoding: x̂ = 0, ỹ = noise, success iff the ZF estimate is 0.
ProbabilityEstimate pzf_empirical(const DenseMatrix& r, double sigma,
                                  std::uint64_t trials, const RngSpec& rng);

/// ∫_{t−ζ}^{t+ζ} exp(−x² / 2σ²) dx.
double gaussian_window_integral(double t, double zeta, double sigma);

/// Gauss–Legendre rule on [−1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(std::size_t points);

}  // namespace zfprob
