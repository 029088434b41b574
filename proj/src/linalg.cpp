#include "robkf/linalg.hpp"

#include "robkf/error.hpp"

#include <algorithm>

namespace robkf {

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

bool is_positive_definite(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  if (!m.allFinite()) return false;
  Eigen::LLT<Matrix> llt(symmetrize(m));
  return llt.info() == Eigen::Success;
}

Vector symmetric_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_eigenvalue(const Matrix& symmetric) { return symmetric_eigenvalues(symmetric).minCoeff(); }

double max_eigenvalue(const Matrix& symmetric) { return symmetric_eigenvalues(symmetric).maxCoeff(); }

Matrix spectral_apply(const Matrix& symmetric, const std::function<double(double)>& f) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(symmetric));
  Vector d = es.eigenvalues().unaryExpr(f);
  const Matrix& u = es.eigenvectors();
  return symmetrize(u * d.asDiagonal() * u.transpose());
}

Matrix cholesky_factor(const Matrix& spd) {
  Eigen::LLT<Matrix> llt(symmetrize(spd));
  if (spd.rows() != spd.cols() || llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotSPD, "matrix is not symmetric positive definite");
  }
  return llt.matrixL();
}

Matrix spd_inverse(const Matrix& spd) {
  Eigen::LLT<Matrix> llt(symmetrize(spd));
  if (spd.rows() != spd.cols() || llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotSPD, "matrix is not symmetric positive definite");
  }
  return symmetrize(llt.solve(Matrix::Identity(spd.rows(), spd.cols())));
}

Eigen::Index numerical_rank(const Matrix& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  return (s.array() > rel_tol * s(0)).count();
}

double largest_singular_value(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double smallest_singular_value(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  return s(s.size() - 1);
}

double spectral_radius(const Matrix& m) {
  Eigen::EigenSolver<Matrix> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix repeat_block_diagonal(const Matrix& block, Eigen::Index count) {
  Matrix out = Matrix::Zero(block.rows() * count, block.cols() * count);
  for (Eigen::Index i = 0; i < count; ++i) {
    out.block(i * block.rows(), i * block.cols(), block.rows(), block.cols()) = block;
  }
  return out;
}

}  // namespace robkf
