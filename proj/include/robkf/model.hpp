#pragma once

#include "robkf/linalg.hpp"

#include <cstdint>
#include <vector>

namespace robkf {

/// Unvalidated matrix bundle for x_{k+1} = A x_k + B v_k, y_k = C x_k + D v_k,
/// with v_k unit-variance white noise and x_0 ~ N(x0_mean, V0).
struct ModelMatrices {
  Matrix A;
  Matrix B;
  Matrix C;
  Matrix D;
  Vector x0_mean;
  Matrix V0;
};

/// A state-space model whose dimensions agree, with D D^T and V0 positive definite.
class StateSpaceModel {
 public:
  const Matrix& A() const noexcept { return m_.A; }
  const Matrix& B() const noexcept { return m_.B; }
  const Matrix& C() const noexcept { return m_.C; }
  const Matrix& D() const noexcept { return m_.D; }
  const Vector& x0_mean() const noexcept { return m_.x0_mean; }
  const Matrix& V0() const noexcept { return m_.V0; }
  const ModelMatrices& matrices() const noexcept { return m_; }

  Eigen::Index n() const noexcept { return m_.A.rows(); }
  Eigen::Index m() const noexcept { return m_.B.cols(); }
  Eigen::Index p() const noexcept { return m_.C.rows(); }

 private:
  explicit StateSpaceModel(ModelMatrices m) : m_(std::move(m)) {}
  friend StateSpaceModel validate(ModelMatrices raw);

  ModelMatrices m_;
};

/// Throws DimensionMismatch, SingularDD, V0NotSPD, or ParseError (non-finite entry).
StateSpaceModel validate(ModelMatrices raw);

/// A reachable and observable model rewritten so that B D^T = 0.
///
/// The rewrite uses A~ = A - B D^T (D D^T)^{-1} C and B~ = B (I - D^T (D D^T)^{-1} D),
/// which keeps C, D and the noise dimension unchanged.
class NormalizedModel {
 public:
  const StateSpaceModel& state_space() const noexcept { return model_; }
  const Matrix& A() const noexcept { return model_.A(); }
  const Matrix& B() const noexcept { return model_.B(); }
  const Matrix& C() const noexcept { return model_.C(); }
  const Matrix& D() const noexcept { return model_.D(); }
  const Vector& x0_mean() const noexcept { return model_.x0_mean(); }
  const Matrix& V0() const noexcept { return model_.V0(); }

  Eigen::Index n() const noexcept { return model_.n(); }
  Eigen::Index m() const noexcept { return model_.m(); }
  Eigen::Index p() const noexcept { return model_.p(); }

  /// B B^T
  const Matrix& process_noise() const noexcept { return bbt_; }
  /// D D^T
  const Matrix& measurement_noise() const noexcept { return ddt_; }
  /// C^T (D D^T)^{-1} C
  const Matrix& observation_information() const noexcept { return info_; }
  /// Numerical rank of B B^T, kept for diagnostics.
  Eigen::Index noise_rank() const noexcept { return noise_rank_; }

 private:
  NormalizedModel(StateSpaceModel model, Eigen::Index noise_rank);
  friend NormalizedModel normalize(const StateSpaceModel& model);

  StateSpaceModel model_;
  Matrix bbt_;
  Matrix ddt_;
  Matrix info_;
  Eigen::Index noise_rank_;
};

/// Throws NotReachable or NotObservable when the rewritten model fails the rank tests.
NormalizedModel normalize(const StateSpaceModel& model);

bool is_reachable(const Matrix& A, const Matrix& B);
bool is_observable(const Matrix& A, const Matrix& C);

/// [B, AB, ..., A^{N-1} B]
Matrix reachability_matrix(const Matrix& A, const Matrix& B, Eigen::Index N);
Matrix reachability_matrix(const NormalizedModel& model, Eigen::Index N);

/// Block rows C A^{N-1}, ..., C A, C from top to bottom.
Matrix observability_matrix(const Matrix& A, const Matrix& C, Eigen::Index N);
Matrix observability_matrix(const NormalizedModel& model, Eigen::Index N);

/// Block rows A^{N-1}, ..., A, I from top to bottom.
Matrix powers_matrix(const Matrix& A, Eigen::Index N);
Matrix powers_matrix(const NormalizedModel& model, Eigen::Index N);

/// One realization of the nominal model.
struct Trajectory {
  std::vector<Vector> states;        // x_0 ... x_{steps-1}
  std::vector<Vector> observations;  // y_0 ... y_{steps-1}
  std::vector<Vector> noises;        // v_0 ... v_{steps-1}
  std::uint64_t seed = 0;
};

/// Draws x_0 ~ N(x0_mean, V0) and drives the model with N(0, I_m) noise.
/// Uses std::mt19937_64 seeded with `seed` and std::normal_distribution, so
/// a given seed reproduces the same trajectory on a given standard library.
Trajectory simulate(const StateSpaceModel& model, std::size_t steps, std::uint64_t seed);

}  // namespace robkf
