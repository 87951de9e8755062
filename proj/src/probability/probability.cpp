#include "zfprob/probability.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "zfprob/decode.hpp"
#include "zfprob/linalg.hpp"

namespace zfprob {

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::Diagonal: return "diagonal";
    case Method::Quadrature: return "quad";
    case Method::MonteCarlo: return "mc";
    case Method::Empirical: return "empirical";
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  if (name == "diagonal") return Method::Diagonal;
  if (name == "quad" || name == "quadrature") return Method::Quadrature;
  if (name == "mc" || name == "montecarlo") return Method::MonteCarlo;
  if (name == "empirical") return Method::Empirical;
  throw Error(Errc::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

double erf(double x) { return std::erf(x); }

double erf_window(double lo, double hi) {
  if (lo >= 0.0) return 0.5 * (std::erfc(lo) - std::erfc(hi));
  if (hi <= 0.0) return 0.5 * (std::erfc(-hi) - std::erfc(-lo));
  return 0.5 * (std::erf(hi) - std::erf(lo));
}

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
const double kSqrt2Pi = std::sqrt(2.0 * std::numbers::pi);

void require_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(Errc::InvalidArgument, "sigma must be positive and finite");
  }
}

void require_triangular(const DenseMatrix& r) {
  if (!is_upper_triangular(r)) {
    throw Error(Errc::InvalidArgument, "expected a square upper-triangular matrix");
  }
  for (std::size_t i = 0; i < r.rows(); ++i) {
    if (std::abs(r(i, i)) < tol::kPivot) {
      throw Error(Errc::SingularMatrix, "zero diagonal at " + std::to_string(i));
    }
  }
}

// Tensor rule over the outer coordinates ξ_{n−1}, …, ξ_1. Row i of Rξ only
// involves ξ_i..ξ_{n−1}, so descending from the last coordinate completes one
// row per level; ξ_0 appears only in row 0 and is integrated exactly.
class CubeIntegrator {
 public:
  CubeIntegrator(const DenseMatrix& r, double sigma, std::size_t panels,
                 const GaussLegendreRule& rule)
      : r_(r), n_(r.rows()), sigma_(sigma) {
    const double width = 1.0 / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
      const double mid = -0.5 + (static_cast<double>(p) + 0.5) * width;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        nodes_.push_back(mid + 0.5 * width * rule.nodes[q]);
        weights_.push_back(0.5 * width * rule.weights[q]);
      }
    }
    for (std::size_t i = 0; i < n_; ++i) {
      row_scale_[i] = std::abs(r(i, i)) / (kSqrt2Pi * sigma);
    }
    half_width_ = 0.5 * std::abs(r(0, 0));
  }

  double integrate() {
    partial_[n_] = {};
    return descend(n_ - 1, 1.0);
  }

 private:
  double descend(std::size_t j, double weight) {
    double sum = 0.0;
    const auto& above = partial_[j + 1];
    auto& here = partial_[j];
    for (std::size_t q = 0; q < nodes_.size(); ++q) {
      const double t = nodes_[q];
      for (std::size_t i = 0; i <= j; ++i) here[i] = above[i] + r_(i, j) * t;
      const double row = here[j];
      const double g =
          weight * weights_[q] * row_scale_[j] * std::exp(-row * row / (2.0 * sigma_ * sigma_));
      if (g == 0.0) continue;
      if (j == 1) {
        const double c = here[0];
        const double scale = kSqrt2 * sigma_;
        sum += g * erf_window((c - half_width_) / scale, (c + half_width_) / scale);
      } else {
        sum += descend(j - 1, g);
      }
    }
    return sum;
  }

  const DenseMatrix& r_;
  std::size_t n_;
  double sigma_;
  double half_width_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::array<double, tol::kMaxQuadratureDimension> row_scale_{};
  std::array<std::array<double, tol::kMaxQuadratureDimension>,
             tol::kMaxQuadratureDimension + 1>
      partial_{};
};

std::uint64_t ipow(std::uint64_t base, std::size_t exp) {
  std::uint64_t v = 1;
  for (std::size_t i = 0; i < exp; ++i) v *= base;
  return v;
}

}  // namespace

ProbabilityEstimate pzf_diagonal(const DenseMatrix& r, double sigma) {
  require_sigma(sigma);
  if (!r.is_square()) throw Error(Errc::DimensionMismatch, "r must be square");
  const std::size_t n = r.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && std::abs(r(i, j)) > tol::kDiagonal) {
        throw Error(Errc::NotDiagonal, "entry (" + std::to_string(i) + "," +
                                           std::to_string(j) + ") is off-diagonal");
      }
  require_triangular(r);

  double value = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    value *= erf(std::abs(r(i, i)) / (2.0 * kSqrt2 * sigma));
  }
  return {value, Method::Diagonal, static_cast<double>(n) * 1e-12, n, std::nullopt};
}

ProbabilityEstimate pzf_quadrature(const DenseMatrix& r, double sigma,
                                   double target_abs_error) {
  require_sigma(sigma);
  require_triangular(r);
  const std::size_t n = r.rows();
  if (n > tol::kMaxQuadratureDimension) {
    throw Error(Errc::DimensionTooLarge,
                "quadrature supports n <= " + std::to_string(tol::kMaxQuadratureDimension) +
                    ", got " + std::to_string(n));
  }
  if (!(target_abs_error >= tol::kMinQuadratureTarget)) {
    throw Error(Errc::InvalidArgument, "target_abs_error below 1e-8");
  }

  if (n == 1) {
    const double h = 0.5 * std::abs(r(0, 0)) / (kSqrt2 * sigma);
    return {erf_window(-h, h), Method::Quadrature, tol::kQuadratureFloor, 1, std::nullopt};
  }

  static const GaussLegendreRule rule = gauss_legendre(tol::kGaussLegendreNodes);
  const std::size_t outer = n - 1;

  std::uint64_t evaluations = ipow(tol::kGaussLegendreNodes, outer);
  double previous = CubeIntegrator(r, sigma, 1, rule).integrate();
  for (std::size_t panels = 2;; panels *= 2) {
    const std::uint64_t cost = ipow(tol::kGaussLegendreNodes * panels, outer);
    if (evaluations + cost > tol::kQuadratureEvaluationCap) {
      throw Error(Errc::NoConvergence, "quadrature hit the evaluation cap at " +
                                           std::to_string(panels / 2) + " panels");
    }
    const double current = CubeIntegrator(r, sigma, panels, rule).integrate();
    evaluations += cost;
    const double change = std::abs(current - previous);
    if (change < 0.5 * target_abs_error) {
      return {std::clamp(current, 0.0, 1.0), Method::Quadrature,
              std::max(change, tol::kQuadratureFloor), evaluations, std::nullopt};
    }
    previous = current;
  }
}

ProbabilityEstimate pzf_monte_carlo(const DenseMatrix& r, double sigma,
                                    std::uint64_t samples, const RngSpec& rng) {
  require_sigma(sigma);
  require_triangular(r);
  if (samples < tol::kMinSamples) {
    throw Error(Errc::InvalidArgument, "Monte Carlo needs at least 1000 samples");
  }
  const std::size_t n = r.rows();
  CounterRng gen(rng);
  std::vector<double> xi(n);

  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t s = 1; s <= samples; ++s) {
    for (double& x : xi) x = gen.uniform() - 0.5;
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = i; j < n; ++j) row += r(i, j) * xi[j];
      q += row * row;
    }
    const double f = std::exp(-q / (2.0 * sigma * sigma));
    const double delta = f - mean;
    mean += delta / static_cast<double>(s);
    m2 += delta * (f - mean);
  }
  const double scale = std::abs(det_upper_triangular(r)) /
                       std::pow(2.0 * std::numbers::pi * sigma * sigma, 0.5 * static_cast<double>(n));
  const double count = static_cast<double>(samples);
  const double std_error = scale * std::sqrt(m2 / (count - 1.0) / count);
  return {std::clamp(scale * mean, 0.0, 1.0), Method::MonteCarlo, std_error, samples,
          rng.seed};
}

ProbabilityEstimate pzf_empirical(const DenseMatrix& r, double sigma,
                                  std::uint64_t trials, const RngSpec& rng) {
  require_sigma(sigma);
  require_triangular(r);
  if (trials < tol::kMinSamples) {
    throw Error(Errc::InvalidArgument, "empirical estimate needs at least 1000 trials");
  }
  const std::size_t n = r.rows();
  GaussianStream noise(rng);
  ILSInstance inst{r, RealVector(n), sigma, std::nullopt};

  std::uint64_t successes = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    for (double& y : inst.y_tilde) y = sigma * noise.next();
    const DecodeResult zf = zf_decode(inst);
    successes += std::all_of(zf.estimate.begin(), zf.estimate.end(),
                             [](std::int64_t v) { return v == 0; });
  }
  const double count = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / count;
  return {p, Method::Empirical, std::sqrt(p * (1.0 - p) / count), trials, rng.seed};
}

double gaussian_window_integral(double t, double zeta, double sigma) {
  if (!(zeta > 0.0)) throw Error(Errc::InvalidArgument, "zeta must be positive");
  if (sigma == 0.0 || !std::isfinite(sigma)) {
    throw Error(Errc::InvalidArgument, "sigma must be nonzero");
  }
  const double s = std::abs(sigma);
  const double a = std::abs(t);
  return s * kSqrt2Pi * erf_window((a - zeta) / (kSqrt2 * s), (a + zeta) / (kSqrt2 * s));
}

}  // namespace zfprob
