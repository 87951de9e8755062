#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "zfprob/matrix.hpp"

namespace zfprob {

/// Generator family pinned by every RngSpec: SplitMix64 output function over a
/// 64-bit counter, uniforms from the top 53 bits, normals by Box–Muller.
inline constexpr std::string_view kRngAlgorithmId = "splitmix64-counter/box-muller/v1";

struct RngSpec {
  std::uint64_t seed = 0;
  std::string algorithm_id{kRngAlgorithmId};

  /// Independent sub-stream for worker or case `index`.
  RngSpec derive(std::uint64_t index) const;
  void validate() const;

  friend bool operator==(const RngSpec&, const RngSpec&) = default;
};

/// Counter-based: draw i is a pure function of (seed, i).
class CounterRng {
 public:
  explicit CounterRng(const RngSpec& spec);

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1).
  double uniform() noexcept;
  std::uint64_t position() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Deterministic stream of standard normal draws.
class GaussianStream {
 public:
  explicit GaussianStream(const RngSpec& spec);

  double next();

 private:
  CounterRng rng_;
  std::optional<double> spare_;
};

/// m×n matrix of i.i.d. standard normal entries, filled row by row.
DenseMatrix gaussian_matrix(std::size_t m, std::size_t n, GaussianStream& stream);

std::uint64_t splitmix64_mix(std::uint64_t x) noexcept;

}  // namespace zfprob
