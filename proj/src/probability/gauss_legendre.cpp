#include <cmath>
#include <numbers>

#include "zfprob/probability.hpp"

namespace zfprob {

GaussLegendreRule gauss_legendre(std::size_t points) {
  if (points == 0) throw Error(Errc::InvalidArgument, "Gauss-Legendre needs points > 0");
  GaussLegendreRule rule{std::vector<double>(points), std::vector<double>(points)};
  const std::size_t half = (points + 1) / 2;
  const double n = static_cast<double>(points);

  for (std::size_t i = 0; i < half; ++i) {
    // Chebyshev-like initial guess for the i-th root, then Newton.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (std::size_t j = 1; j <= points; ++j) {
        const double p2 = p1;
        p1 = p0;
        const double jj = static_cast<double>(j);
        p0 = ((2.0 * jj - 1.0) * x * p1 - (jj - 1.0) * p2) / jj;
      }
      derivative = n * (x * p0 - p1) / (x * x - 1.0);
      const double step = p0 / derivative;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
    rule.nodes[i] = -x;
    rule.nodes[points - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[points - 1 - i] = w;
  }
  return rule;
}

}  // namespace zfprob
