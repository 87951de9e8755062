#include "zfprob/decode.hpp"

#include <cmath>
#include <string>

#include "zfprob/linalg.hpp"
#include "zfprob/tolerances.hpp"

namespace zfprob {

std::string_view to_string(DecoderKind kind) noexcept {
  switch (kind) {
    case DecoderKind::ZF: return "ZF";
    case DecoderKind::SIC: return "SIC";
    case DecoderKind::BruteForce: return "BruteForce";
  }
  return "Unknown";
}

void ILSInstance::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(Errc::InvalidArgument, "sigma must be positive");
  }
  if (!is_upper_triangular(r)) {
    throw Error(Errc::InvalidArgument, "r must be square upper triangular");
  }
  if (y_tilde.size() != r.rows() || (x_true && x_true->size() != r.rows())) {
    throw Error(Errc::DimensionMismatch, "instance vectors do not match r");
  }
  for (std::size_t i = 0; i < r.rows(); ++i) {
    if (std::abs(r(i, i)) < tol::kPivot) {
      throw Error(Errc::SingularMatrix, "zero diagonal at " + std::to_string(i));
    }
    if (r(i, i) < 0.0) throw Error(Errc::InvalidArgument, "r diagonal must be positive");
  }
  for (const double v : y_tilde) {
    if (!std::isfinite(v)) throw Error(Errc::InvalidArgument, "observation not finite");
  }
}

double residual_norm(const DenseMatrix& r, std::span<const double> y,
                     std::span<const std::int64_t> x) {
  RealVector diff = multiply(r, x);
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = y[i] - diff[i];
  return norm2(diff);
}

DecodeResult zf_decode(const ILSInstance& inst) {
  inst.validate();
  DecodeResult out;
  out.estimate = round_nearest(back_substitute(inst.r, inst.y_tilde));
  out.residual = residual_norm(inst.r, inst.y_tilde, out.estimate);
  out.decoder = DecoderKind::ZF;
  return out;
}

DecodeResult sic_decode(const ILSInstance& inst) {
  inst.validate();
  const std::size_t n = inst.r.rows();
  DecodeResult out;
  out.estimate.assign(n, 0);
  for (std::size_t k = n; k-- > 0;) {
    double s = inst.y_tilde[k];
    for (std::size_t j = k + 1; j < n; ++j) {
      s -= inst.r(k, j) * static_cast<double>(out.estimate[j]);
    }
    out.estimate[k] = round_nearest(s / inst.r(k, k));
  }
  out.residual = residual_norm(inst.r, inst.y_tilde, out.estimate);
  out.decoder = DecoderKind::SIC;
  return out;
}

IntVector lift_estimate(const IntMatrix& z, std::span<const std::int64_t> estimate) {
  if (!z.is_square()) throw Error(Errc::NotUnimodular, "non-square transform");
  const std::int64_t det = exact_determinant(z);
  if (det != 1 && det != -1) {
    throw Error(Errc::NotUnimodular, "determinant is " + std::to_string(det));
  }
  return multiply(z, estimate);
}

DecodeResult ils_brute_force(const ILSInstance& inst, int box_radius) {
  inst.validate();
  const std::size_t n = inst.r.rows();
  if (n > tol::kMaxBruteForceDimension) {
    throw Error(Errc::DimensionTooLarge,
                "brute force limited to n <= " +
                    std::to_string(tol::kMaxBruteForceDimension));
  }
  if (box_radius < 1) throw Error(Errc::InvalidArgument, "box_radius must be positive");

  const IntVector center = zf_decode(inst).estimate;
  IntVector candidate(n);
  for (std::size_t i = 0; i < n; ++i) candidate[i] = center[i] - box_radius;

  DecodeResult best{candidate, residual_norm(inst.r, inst.y_tilde, candidate),
                    DecoderKind::BruteForce};
  // Odometer over the box in lexicographic order; strict improvement only,
  // so the first (smallest) minimizer wins ties.
  while (true) {
    std::size_t pos = n;
    while (pos-- > 0) {
      if (candidate[pos] < center[pos] + box_radius) {
        ++candidate[pos];
        break;
      }
      candidate[pos] = center[pos] - box_radius;
    }
    if (pos == static_cast<std::size_t>(-1)) break;
    const double res = residual_norm(inst.r, inst.y_tilde, candidate);
    if (res < best.residual) {
      best.estimate = candidate;
      best.residual = res;
    }
  }
  return best;
}

ILSInstance normalize_signs(ILSInstance inst) {
  for (std::size_t i = 0; i < inst.r.rows(); ++i) {
    if (inst.r(i, i) < 0.0) {
      for (std::size_t j = i; j < inst.r.cols(); ++j) inst.r(i, j) = -inst.r(i, j);
      inst.y_tilde[i] = -inst.y_tilde[i];
    }
  }
  return inst;
}

ILSInstance reduce_instance(const ILSInstance& inst, const ReductionResult& reduction) {
  ILSInstance out;
  out.r = reduction.r_bar;
  out.y_tilde = multiply(transpose(reduction.q_bar), inst.y_tilde);
  out.sigma = inst.sigma;
  if (inst.x_true) out.x_true = multiply(unimodular_inverse(reduction.z), *inst.x_true);
  return out;
}

}  // namespace zfprob
