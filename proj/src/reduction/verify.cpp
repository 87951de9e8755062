#include <cmath>

#include "zfprob/linalg.hpp"
#include "zfprob/reduction.hpp"
#include "zfprob/tolerances.hpp"

namespace zfprob {

bool ReductionAudit::ok() const noexcept {
  return unimodular() && triangular && positive_diagonal &&
         reconstruction_error <= tol::kReductionReconstruction &&
         determinant_error <= tol::kDeterminant;
}

ReductionAudit audit_reduction(const ReductionResult& result) {
  ReductionAudit audit;
  audit.det_z = exact_determinant(result.z);

  const DenseMatrix rebuilt =
      multiply(multiply(transpose(result.q_bar), result.r_input), to_dense(result.z));
  audit.reconstruction_error =
      frobenius_distance(rebuilt, result.r_bar) / frobenius_norm(result.r_input);

  const double det_in = std::abs(det_upper_triangular(result.r_input));
  const double det_out = std::abs(det_upper_triangular(result.r_bar));
  audit.determinant_error = std::abs(det_out - det_in) / det_in;

  audit.orthogonality_error =
      frobenius_distance(multiply(transpose(result.q_bar), result.q_bar),
                         DenseMatrix::identity(result.q_bar.cols()));

  audit.triangular = is_upper_triangular(result.r_bar);
  audit.positive_diagonal = true;
  for (std::size_t i = 0; i < result.r_bar.rows(); ++i) {
    audit.positive_diagonal = audit.positive_diagonal && result.r_bar(i, i) > 0.0;
  }
  return audit;
}

}  // namespace zfprob
