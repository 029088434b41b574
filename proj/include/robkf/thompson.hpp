#pragma once

#include "robkf/linalg.hpp"

namespace robkf {

/// Thompson part metric on the SPD cone:
/// d_T(P, Q) = max_i |log lambda_i|, lambda_i the generalized eigenvalues of Q x = lambda P x.
/// Throws NotSPD or DimensionMismatch.
double thompson_metric(const Matrix& P, const Matrix& Q);

/// Upper bound on the Thompson contraction coefficient of
/// h(P) = M (P^{-1} + W1)^{-1} M^T + W2:
///   (sqrt(s) / (1 + sqrt(1 + s)))^2,  s = sigma_1(W1^{-1} M^T W2^{-1} M).
/// Throws NotSPD when W1 or W2 is not positive definite.
double contraction_bound(const Matrix& M, const Matrix& W1, const Matrix& W2);

}  // namespace robkf
