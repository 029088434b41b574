#include "robkf/thompson.hpp"

#include "robkf/error.hpp"

#include <cmath>

namespace robkf {

double thompson_metric(const Matrix& P, const Matrix& Q) {
  if (P.rows() != Q.rows() || P.cols() != Q.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "thompson_metric: shapes differ");
  }
  if (!is_positive_definite(P) || !is_positive_definite(Q)) {
    throw Error(ErrorCode::NotSPD, "thompson_metric: arguments must be positive definite");
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(symmetrize(Q), symmetrize(P), Eigen::EigenvaluesOnly);
  const Vector& lambda = ges.eigenvalues();
  return std::max(std::abs(std::log(lambda.minCoeff())), std::abs(std::log(lambda.maxCoeff())));
}

double contraction_bound(const Matrix& M, const Matrix& W1, const Matrix& W2) {
  if (!is_positive_definite(W1) || !is_positive_definite(W2)) {
    throw Error(ErrorCode::NotSPD, "contraction_bound: W1 and W2 must be positive definite");
  }
  Eigen::LLT<Matrix> w1(symmetrize(W1));
  Eigen::LLT<Matrix> w2(symmetrize(W2));
  const Matrix product = w1.solve(M.transpose() * w2.solve(M));
  const double s = largest_singular_value(product);
  const double root = std::sqrt(s) / (1.0 + std::sqrt(1.0 + s));
  return root * root;
}

}  // namespace robkf
