#include "zfprob/rng.hpp"

#include <cmath>
#include <numbers>

namespace zfprob {

std::uint64_t splitmix64_mix(std::uint64_t x) noexcept {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

RngSpec RngSpec::derive(std::uint64_t index) const {
  RngSpec child = *this;
  child.seed = splitmix64_mix(seed ^ splitmix64_mix(index + kGolden));
  return child;
}

void RngSpec::validate() const {
  if (algorithm_id != kRngAlgorithmId) {
    throw Error(Errc::InvalidArgument, "unsupported rng algorithm '" + algorithm_id + "'");
  }
}

CounterRng::CounterRng(const RngSpec& spec) : key_(spec.seed) { spec.validate(); }

std::uint64_t CounterRng::next_u64() noexcept {
  ++counter_;
  return splitmix64_mix(key_ + counter_ * kGolden);
}

double CounterRng::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

GaussianStream::GaussianStream(const RngSpec& spec) : rng_(spec) {}

double GaussianStream::next() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  // u1 in (0, 1] keeps the logarithm finite.
  const double u1 = static_cast<double>((rng_.next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = rng_.uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

DenseMatrix gaussian_matrix(std::size_t m, std::size_t n, GaussianStream& stream) {
  DenseMatrix a(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = stream.next();
  return a;
}

}  // namespace zfprob
