#pragma once

#include <Eigen/Dense>

#include <functional>

namespace robkf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// (M + M^T) / 2
Matrix symmetrize(const Matrix& m);

/// Positive definiteness by Cholesky success on the symmetrized input.
bool is_positive_definite(const Matrix& m);

double min_eigenvalue(const Matrix& symmetric);
double max_eigenvalue(const Matrix& symmetric);

/// Eigenvalues of the symmetrized input, ascending.
Vector symmetric_eigenvalues(const Matrix& m);

/// Applies a scalar function to the spectrum: U diag(f(d)) U^T, where the
/// symmetrized input equals U diag(d) U^T.
Matrix spectral_apply(const Matrix& symmetric, const std::function<double(double)>& f);

/// Lower Cholesky factor of the symmetrized input. Throws NotSPD.
Matrix cholesky_factor(const Matrix& spd);

/// Inverse of an SPD matrix through a Cholesky solve, symmetrized. Throws NotSPD.
Matrix spd_inverse(const Matrix& spd);

/// Number of singular values above rel_tol * sigma_1.
Eigen::Index numerical_rank(const Matrix& m, double rel_tol = 1e-10);

double largest_singular_value(const Matrix& m);
double smallest_singular_value(const Matrix& m);

/// Largest eigenvalue modulus of a general square matrix.
double spectral_radius(const Matrix& m);

/// Block-diagonal matrix with `count` copies of `block`.
Matrix repeat_block_diagonal(const Matrix& block, Eigen::Index count);

}  // namespace robkf
