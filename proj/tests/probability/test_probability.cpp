#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "zfprob/error.hpp"
#include "zfprob/linalg.hpp"
#include "zfprob/probability.hpp"
#include "zfprob/reduction.hpp"

using namespace zfprob;

namespace {

constexpr long double kPi = 3.141592653589793238462643383279502884L;

// erf by its Maclaurin series in long double; accurate to ~1e-17 for |x| ≤ 3.
long double erf_taylor(long double x) {
  long double term = x, sum = x;
  for (int k = 1; k < 200; ++k) {
    term *= -x * x / k;
    const long double add = term / (2 * k + 1);
    sum += add;
    if (std::abs(add) < 1e-22L) break;
  }
  return 2.0L / std::sqrt(kPi) * sum;
}

// P_ZF straight from the n-dimensional integral, composite Simpson in every
// coordinate, no erf anywhere.
double pzf_simpson(const DenseMatrix& r, double sigma, int intervals) {
  const std::size_t n = r.rows();
  const int pts = intervals + 1;
  const double h = 1.0 / intervals;
  std::vector<double> node(pts), weight(pts);
  for (int i = 0; i < pts; ++i) {
    node[i] = -0.5 + i * h;
    weight[i] = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    weight[i] *= h / 3.0;
  }
  std::vector<int> idx(n, 0);
  long double total = 0;
  while (true) {
    double w = 1.0, q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = i; j < n; ++j) row += r(i, j) * node[idx[j]];
      q += row * row;
      w *= weight[idx[i]];
    }
    total += w * std::exp(-q / (2 * sigma * sigma));
    std::size_t k = 0;
    while (k < n && ++idx[k] == pts) idx[k++] = 0;
    if (k == n) break;
  }
  double det = 1.0;
  for (std::size_t i = 0; i < n; ++i) det *= r(i, i);
  return std::abs(det) / std::pow(2 * M_PI * sigma * sigma, n / 2.0) * static_cast<double>(total);
}

DenseMatrix random_upper(std::size_t n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> d(0.5, 2.5), off(-2.0, 2.0);
  DenseMatrix r(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    r(i, i) = d(gen);
    for (std::size_t j = i + 1; j < n; ++j) r(i, j) = off(gen);
  }
  return r;
}

}  // namespace

TEST(Erf, MatchesSeriesOracle) {
  EXPECT_EQ(zfprob::erf(0.0), 0.0);
  EXPECT_NEAR(zfprob::erf(1.0), 0.84270079, 5e-9);
  for (double x = -3.0; x <= 3.0; x += 0.01) {
    ASSERT_NEAR(zfprob::erf(x), static_cast<double>(erf_taylor(x)), 1e-12) << x;
    ASSERT_EQ(zfprob::erf(-x), -zfprob::erf(x));
  }
  EXPECT_EQ(zfprob::erf(10.0), 1.0);
}

TEST(ErfWindow, AgreesWithDifferenceAndKeepsTails) {
  for (double lo = -4.0; lo < 4.0; lo += 0.37) {
    for (double width : {0.01, 0.5, 2.0}) {
      const double hi = lo + width;
      const long double expected = 0.5L * (erf_taylor(std::min(hi, 3.0)) - erf_taylor(std::min(lo, 3.0)));
      if (hi <= 3.0) {
        ASSERT_NEAR(erf_window(lo, hi), static_cast<double>(expected), 1e-12);
      }
      ASSERT_GE(erf_window(lo, hi), 0.0);
    }
  }
  // Far tail: naive erf difference is exactly zero, the window is not.
  const double tail = erf_window(8.0, 9.0);
  EXPECT_GT(tail, 0.0);
  EXPECT_NEAR(tail / (0.5 * (std::erfc(8.0) - std::erfc(9.0))), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(erf_window(-9.0, -8.0), tail);
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  const GaussLegendreRule rule = gauss_legendre(32);
  ASSERT_EQ(rule.nodes.size(), 32u);
  for (int degree = 0; degree <= 63; ++degree) {
    double s = 0.0;
    for (std::size_t i = 0; i < 32; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], degree);
    const double exact = degree % 2 ? 0.0 : 2.0 / (degree + 1);
    ASSERT_NEAR(s, exact, 1e-14) << degree;
  }
  const GaussLegendreRule two = gauss_legendre(2);
  EXPECT_NEAR(two.nodes[1], 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(two.weights[0], 1.0, 1e-15);
}

TEST(PzfDiagonal, Examples) {
  const ProbabilityEstimate p =
      pzf_diagonal(DenseMatrix{{std::sqrt(2.0), 0.0}, {0.0, 2 * std::sqrt(2.0)}}, 0.5);
  EXPECT_NEAR(p.value, 0.8388, 5e-4);
  EXPECT_NEAR(p.value, std::erf(1.0) * std::erf(2.0), 1e-15);
  EXPECT_EQ(p.method, Method::Diagonal);
  EXPECT_DOUBLE_EQ(p.error_bound, 2e-12);
  EXPECT_EQ(pzf_diagonal(DenseMatrix::identity(3), 1e-3).value, 1.0);
  EXPECT_LT(pzf_diagonal(DenseMatrix{{1e-9}}, 1.0).value, 1e-9);
}

TEST(PzfDiagonal, Errors) {
  try {
    pzf_diagonal(DenseMatrix{{1.0, 0.1}, {0.0, 1.0}}, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotDiagonal);
  }
  EXPECT_THROW(pzf_diagonal(DenseMatrix::identity(2), 0.0), Error);
  EXPECT_THROW(pzf_diagonal(DenseMatrix::identity(2), -1.0), Error);
}

TEST(PzfQuadrature, ReferenceValues) {
  EXPECT_NEAR(pzf_quadrature(DenseMatrix{{4.0, 9.0}, {0.0, 1.0}}, 0.5).value, 0.3413, 5e-4);
  EXPECT_NEAR(pzf_quadrature(DenseMatrix{{4.0, 1.0}, {0.0, 1.0}}, 0.5).value, 0.6825, 5e-4);
  const DenseMatrix r{{3.0, 1.5, 0.0}, {0.0, 3.0, -1.51}, {0.0, 0.0, 3.0}};
  EXPECT_NEAR(pzf_quadrature(r, 1.0).value, 0.6105, 5e-4);
  EXPECT_NEAR(pzf_quadrature(lll_reduce(r).r_bar, 1.0).value, 0.6030, 5e-4);
}

TEST(PzfQuadrature, HighPrecisionReferenceValues) {
  // Independently computed to 1e-13 with an adaptive scalar integrator.
  EXPECT_NEAR(pzf_quadrature(DenseMatrix{{4.0, 9.0}, {0.0, 1.0}}, 0.5).value, 0.3413125797751561, 1e-8);
  EXPECT_NEAR(pzf_quadrature(DenseMatrix{{4.0, 1.0}, {0.0, 1.0}}, 0.5).value, 0.6824615224955177, 1e-8);
  const DenseMatrix r{{3.0, 1.5, 0.0}, {0.0, 3.0, -1.51}, {0.0, 0.0, 3.0}};
  EXPECT_NEAR(pzf_quadrature(r, 1.0).value, 0.610463994010968, 1e-8);
  EXPECT_NEAR(pzf_quadrature(lll_reduce(r).r_bar, 1.0).value, 0.6029568012365625, 1e-8);
}

TEST(PzfQuadrature, MatchesSimpsonOracle) {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> sig(0.3, 1.5);
  for (int t = 0; t < 10; ++t) {
    const DenseMatrix r = random_upper(2, gen);
    const double sigma = sig(gen);
    const ProbabilityEstimate q = pzf_quadrature(r, sigma);
    ASSERT_NEAR(q.value, pzf_simpson(r, sigma, 1200), 1e-8) << t;
    ASSERT_LE(q.error_bound, tol::kDefaultQuadratureTarget);
  }
  for (int t = 0; t < 3; ++t) {
    const DenseMatrix r = random_upper(3, gen);
    const double sigma = sig(gen);
    ASSERT_NEAR(pzf_quadrature(r, sigma).value, pzf_simpson(r, sigma, 120), 1e-6) << t;
  }
}

TEST(PzfQuadrature, DiagonalAgreesWithClosedForm) {
  for (std::size_t n = 1; n <= 4; ++n) {
    DenseMatrix r(n, n);
    for (std::size_t i = 0; i < n; ++i) r(i, i) = 0.7 + 0.4 * i;
    for (double sigma : {0.2, 0.6, 1.3}) {
      ASSERT_NEAR(pzf_quadrature(r, sigma).value, pzf_diagonal(r, sigma).value, 1e-9);
    }
  }
}

TEST(PzfQuadrature, InvariantUnderDiagonalSignFlips) {
  const DenseMatrix r{{1.2, -0.7, 0.4}, {0.0, 0.9, 1.1}, {0.0, 0.0, 1.5}};
  const double base = pzf_quadrature(r, 0.6).value;
  for (int mask = 1; mask < 8; ++mask) {
    DenseMatrix f = r;
    for (std::size_t i = 0; i < 3; ++i)
      if (mask >> i & 1)
        for (std::size_t j = 0; j < 3; ++j) f(i, j) = -f(i, j);
    ASSERT_NEAR(pzf_quadrature(f, 0.6).value, base, 1e-9);
  }
}

TEST(PzfQuadrature, PermutationReductionsPreserveValue) {
  std::mt19937_64 gen(13);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + t % 2;
    const DenseMatrix r = random_upper(n, gen);
    const double sigma = 0.4 + 0.1 * (t % 8);
    const ProbabilityEstimate p = pzf_quadrature(r, sigma);
    for (const ReductionResult& red : {sqrd(r), vblast(r)}) {
      const ProbabilityEstimate q = pzf_quadrature(red.r_bar, sigma);
      ASSERT_LE(std::abs(p.value - q.value), 2 * (p.error_bound + q.error_bound)) << t;
    }
  }
}

TEST(PzfQuadrature, FourDimensionsAndErrors) {
  const DenseMatrix r{{1.0, 0.3, -0.2, 0.1}, {0.0, 1.1, 0.4, 0.0}, {0.0, 0.0, 0.9, -0.3},
                      {0.0, 0.0, 0.0, 1.2}};
  const ProbabilityEstimate p = pzf_quadrature(r, 0.7);
  EXPECT_GT(p.value, 0.0);
  EXPECT_LT(p.value, 1.0);
  EXPECT_LE(p.evaluations, tol::kQuadratureEvaluationCap);
  try {
    pzf_quadrature(DenseMatrix::identity(5), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DimensionTooLarge);
  }
  EXPECT_THROW(pzf_quadrature(DenseMatrix::identity(2), 1.0, 1e-9), Error);
  EXPECT_THROW(pzf_quadrature(DenseMatrix{{1.0, 0.0}, {1.0, 1.0}}, 1.0), Error);
  EXPECT_THROW(pzf_quadrature(DenseMatrix::identity(2), 0.0), Error);
}

TEST(SizeReductionGain, TwoByTwoStrictIncrease) {
  std::mt19937_64 gen(14);
  std::uniform_real_distribution<double> diag(0.5, 2.0), ratio(0.55, 3.5), sig(0.3, 1.0);
  for (int t = 0; t < 500; ++t) {
    const double r11 = diag(gen);
    const double r12 = ratio(gen) * r11 * (t % 2 ? 1.0 : -1.0);
    const DenseMatrix r{{r11, r12}, {0.0, diag(gen)}};
    const double sigma = sig(gen);
    const auto reduced = size_reduce_entry(r, IntMatrix::identity(2), 0, 1);
    ASSERT_TRUE(reduced.applied);
    const ProbabilityEstimate p0 = pzf_quadrature(r, sigma);
    const ProbabilityEstimate p1 = pzf_quadrature(reduced.r, sigma);
    ASSERT_GT(p1.value - p0.value, p0.error_bound + p1.error_bound) << t;

    const ReductionResult lll = lll_reduce(r);
    const ProbabilityEstimate p2 = pzf_quadrature(lll.r_bar, sigma);
    ASSERT_GE(p2.value, p0.value - (p0.error_bound + p2.error_bound));
    ASSERT_GT(lll.stats.size_reductions, 0u);
    ASSERT_GT(p2.value - p0.value, p0.error_bound + p2.error_bound) << t;
  }
}

TEST(GaussianWindowIntegral, SymmetryMonotonicityAndDecay) {
  for (double t = 0.0; t < 5.0; t += 0.25) {
    ASSERT_DOUBLE_EQ(gaussian_window_integral(t, 1.0, 1.0), gaussian_window_integral(-t, 1.0, 1.0));
    ASSERT_GT(gaussian_window_integral(t, 1.0, 1.0), gaussian_window_integral(t + 0.25, 1.0, 1.0));
  }
  EXPECT_LT(gaussian_window_integral(1.0, 1.0, 1.0), gaussian_window_integral(0.5, 1.0, 1.0));
  EXPECT_LT(gaussian_window_integral(0.5, 1.0, 1.0), gaussian_window_integral(0.0, 1.0, 1.0));
  EXPECT_LT(gaussian_window_integral(40.0, 1.0, 1.0), 1e-300);
  // f(0) with ζ=1, σ=1 is √(2π)·erf(1/√2).
  EXPECT_NEAR(gaussian_window_integral(0.0, 1.0, 1.0),
              std::sqrt(2 * M_PI) * static_cast<double>(erf_taylor(1.0L / std::sqrt(2.0L))), 1e-11);
  // Against a direct Simpson integral of the Gaussian window.
  const double t = 0.8, zeta = 0.6, sigma = 0.7;
  double s = 0.0;
  const int m = 2000;
  const double a = t - zeta, h = 2 * zeta / m;
  for (int i = 0; i <= m; ++i) {
    const double x = a + i * h;
    const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * std::exp(-x * x / (2 * sigma * sigma));
  }
  EXPECT_NEAR(gaussian_window_integral(t, zeta, sigma), s * h / 3.0, 1e-11);
}

TEST(Rng, Determinism) {
  GaussianStream a(RngSpec{7}), b(RngSpec{7}), c(RngSpec{8});
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.next();
    ASSERT_EQ(x, b.next());
    if (i < 10 && x != c.next()) differs = true;
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, SplitMixKnownAnswer) {
  // First output of the reference SplitMix64 seeded with 0.
  EXPECT_EQ(splitmix64_mix(0x9e3779b97f4a7c15ULL), 0xe220a8397b1dcdafULL);
}

TEST(Rng, CounterIsPureFunctionOfPosition) {
  CounterRng a(RngSpec{99});
  std::vector<std::uint64_t> first;
  for (int i = 0; i < 5; ++i) first.push_back(a.next_u64());
  EXPECT_EQ(a.position(), 5u);
  CounterRng b(RngSpec{99});
  for (int i = 0; i < 5; ++i) EXPECT_EQ(b.next_u64(), first[i]);
  for (int i = 0; i < 10000; ++i) {
    const double u = a.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, DerivedStreamsDifferAndValidate) {
  const RngSpec root{5};
  EXPECT_EQ(root.derive(3), root.derive(3));
  EXPECT_NE(root.derive(3).seed, root.derive(4).seed);
  EXPECT_NE(root.derive(0).seed, root.seed);
  EXPECT_EQ(root.derive(1).algorithm_id, kRngAlgorithmId);
  RngSpec bad{1, "mt19937"};
  EXPECT_THROW(bad.validate(), Error);
  EXPECT_THROW(pzf_monte_carlo(DenseMatrix::identity(2), 1.0, 1000, bad), Error);
}

TEST(Rng, GaussianMomentsSanity) {
  GaussianStream s(RngSpec{2024});
  const int n = 1'000'000;
  long double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double x = s.next();
    sum += x;
    sq += static_cast<long double>(x) * x;
  }
  const double mean = static_cast<double>(sum / n);
  const double var = static_cast<double>(sq / n) - mean * mean;
  EXPECT_LT(std::abs(mean), 5.0 / std::sqrt(n));
  EXPECT_LT(std::abs(var - 1.0), 5.0 * std::sqrt(2.0 / n));
}

TEST(MonteCarlo, AgreesWithQuadratureOnReferenceMatrices) {
  int within = 0, cases = 0;
  for (const DenseMatrix& r : {DenseMatrix{{4.0, 9.0}, {0.0, 1.0}}, DenseMatrix{{4.0, 1.0}, {0.0, 1.0}},
                               DenseMatrix{{std::sqrt(2.0), 0.0}, {0.0, 2 * std::sqrt(2.0)}}}) {
    const ProbabilityEstimate mc = pzf_monte_carlo(r, 0.5, 200'000, RngSpec{static_cast<std::uint64_t>(cases)});
    EXPECT_EQ(mc.method, Method::MonteCarlo);
    EXPECT_EQ(mc.evaluations, 200'000u);
    EXPECT_EQ(mc.seed, std::optional<std::uint64_t>(cases));
    within += std::abs(mc.value - pzf_quadrature(r, 0.5).value) <= 3 * mc.error_bound;
    ++cases;
  }
  EXPECT_EQ(within, 3);
}

TEST(MonteCarlo, DiagonalAgreementAndReproducibility) {
  const DenseMatrix r{{0.8, 0.0}, {0.0, 1.7}};
  const ProbabilityEstimate a = pzf_monte_carlo(r, 0.6, 100'000, RngSpec{3});
  const ProbabilityEstimate b = pzf_monte_carlo(r, 0.6, 100'000, RngSpec{3});
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.error_bound, b.error_bound);
  EXPECT_LE(std::abs(a.value - pzf_diagonal(r, 0.6).value), 3 * a.error_bound);
  EXPECT_LE(a.value, 1.0);
  EXPECT_THROW(pzf_monte_carlo(r, 0.6, 999, RngSpec{3}), Error);
}

TEST(Empirical, ReferenceMatrixStatistically) {
  const ProbabilityEstimate e = pzf_empirical(DenseMatrix{{4.0, 9.0}, {0.0, 1.0}}, 0.5, 200'000, RngSpec{11});
  EXPECT_EQ(e.method, Method::Empirical);
  EXPECT_LE(std::abs(e.value - 0.3413), 3 * e.error_bound);
  EXPECT_NEAR(e.error_bound, std::sqrt(e.value * (1 - e.value) / 200'000), 1e-15);
}

TEST(Empirical, VanishingNoiseAlwaysSucceeds) {
  const ProbabilityEstimate e = pzf_empirical(DenseMatrix::identity(3), 1e-6, 5000, RngSpec{1});
  EXPECT_EQ(e.value, 1.0);
  EXPECT_THROW(pzf_empirical(DenseMatrix::identity(3), 1.0, 10, RngSpec{1}), Error);
}

TEST(Empirical, AgreesWithQuadratureOnRandomInstances) {
  std::mt19937_64 gen(15);
  int within = 0;
  for (int t = 0; t < 20; ++t) {
    const DenseMatrix r = random_upper(2 + t % 2, gen);
    const double sigma = 0.4 + 0.05 * t;
    const ProbabilityEstimate e = pzf_empirical(r, sigma, 100'000, RngSpec{static_cast<std::uint64_t>(t)});
    within += std::abs(e.value - pzf_quadrature(r, sigma).value) <= 3 * e.error_bound;
  }
  EXPECT_GE(within, 19);
}

TEST(Method, Names) {
  EXPECT_EQ(to_string(Method::Quadrature), "quad");
  EXPECT_EQ(method_from_string("quad"), Method::Quadrature);
  EXPECT_EQ(method_from_string("quadrature"), Method::Quadrature);
  EXPECT_EQ(method_from_string("mc"), Method::MonteCarlo);
  EXPECT_EQ(method_from_string("empirical"), Method::Empirical);
  EXPECT_EQ(method_from_string("diagonal"), Method::Diagonal);
  EXPECT_THROW(method_from_string("simpson"), Error);
}
