#include "robkf/model.hpp"

#include "robkf/error.hpp"

#include <random>
#include <sstream>

namespace robkf {
namespace {

std::string shape(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

void require_finite(const Matrix& m, const char* name) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::ParseError, std::string(name) + " has a non-finite entry");
  }
}

}  // namespace

StateSpaceModel validate(ModelMatrices raw) {
  const Eigen::Index n = raw.A.rows();
  if (n == 0 || raw.A.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "A must be square and non-empty, got " + shape(raw.A));
  }
  if (raw.B.rows() != n || raw.B.cols() == 0) {
    throw Error(ErrorCode::DimensionMismatch,
                "B must have " + std::to_string(n) + " rows, got " + shape(raw.B));
  }
  if (raw.C.cols() != n || raw.C.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch,
                "C must have " + std::to_string(n) + " columns, got " + shape(raw.C));
  }
  if (raw.D.rows() != raw.C.rows() || raw.D.cols() != raw.B.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "D must be " + std::to_string(raw.C.rows()) + "x" + std::to_string(raw.B.cols()) +
                    ", got " + shape(raw.D));
  }
  if (raw.x0_mean.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "x0_mean must have " + std::to_string(n) + " entries");
  }
  if (raw.V0.rows() != n || raw.V0.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "V0 must be " + std::to_string(n) + "x" +
                                                  std::to_string(n) + ", got " + shape(raw.V0));
  }
  require_finite(raw.A, "A");
  require_finite(raw.B, "B");
  require_finite(raw.C, "C");
  require_finite(raw.D, "D");
  require_finite(raw.x0_mean, "x0_mean");
  require_finite(raw.V0, "V0");

  if (!is_positive_definite(raw.D * raw.D.transpose())) {
    throw Error(ErrorCode::SingularDD, "D D^T is not positive definite");
  }
  if ((raw.V0 - raw.V0.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, raw.V0.cwiseAbs().maxCoeff()) ||
      !is_positive_definite(raw.V0)) {
    throw Error(ErrorCode::V0NotSPD, "V0 is not symmetric positive definite");
  }
  return StateSpaceModel(std::move(raw));
}

NormalizedModel::NormalizedModel(StateSpaceModel model, Eigen::Index noise_rank)
    : model_(std::move(model)),
      bbt_(symmetrize(model_.B() * model_.B().transpose())),
      ddt_(symmetrize(model_.D() * model_.D().transpose())),
      noise_rank_(noise_rank) {
  Eigen::LLT<Matrix> llt(ddt_);
  info_ = symmetrize(model_.C().transpose() * llt.solve(model_.C()));
}

NormalizedModel normalize(const StateSpaceModel& model) {
  const Matrix& A = model.A();
  const Matrix& B = model.B();
  const Matrix& C = model.C();
  const Matrix& D = model.D();

  Eigen::LLT<Matrix> ddt(symmetrize(D * D.transpose()));
  // Orthogonal projector onto ker(D); B~ = B * projector so B~ D^T = 0.
  const Matrix projector = Matrix::Identity(model.m(), model.m()) - D.transpose() * ddt.solve(D);

  ModelMatrices out = model.matrices();
  out.A = A - B * D.transpose() * ddt.solve(C);
  out.B = B * projector;

  if (!is_reachable(out.A, out.B)) {
    throw Error(ErrorCode::NotReachable, "(A, B) is not reachable after the B D^T = 0 rewrite");
  }
  if (!is_observable(out.A, out.C)) {
    throw Error(ErrorCode::NotObservable, "(A, C) is not observable");
  }
  const Eigen::Index rank = numerical_rank(out.B * out.B.transpose(), 1e-12);
  return NormalizedModel(validate(std::move(out)), rank);
}

bool is_reachable(const Matrix& A, const Matrix& B) {
  return numerical_rank(reachability_matrix(A, B, A.rows())) == A.rows();
}

bool is_observable(const Matrix& A, const Matrix& C) {
  return numerical_rank(observability_matrix(A, C, A.rows())) == A.rows();
}

Matrix reachability_matrix(const Matrix& A, const Matrix& B, Eigen::Index N) {
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();
  Matrix out(n, N * m);
  Matrix block = B;
  for (Eigen::Index j = 0; j < N; ++j) {
    out.middleCols(j * m, m) = block;
    block = A * block;
  }
  return out;
}

Matrix reachability_matrix(const NormalizedModel& model, Eigen::Index N) {
  return reachability_matrix(model.A(), model.B(), N);
}

Matrix observability_matrix(const Matrix& A, const Matrix& C, Eigen::Index N) {
  const Eigen::Index n = A.rows();
  const Eigen::Index p = C.rows();
  Matrix out(N * p, n);
  Matrix block = C;
  // Bottom block row is C; rows above carry increasing powers of A.
  for (Eigen::Index j = 0; j < N; ++j) {
    out.middleRows((N - 1 - j) * p, p) = block;
    block = block * A;
  }
  return out;
}

Matrix observability_matrix(const NormalizedModel& model, Eigen::Index N) {
  return observability_matrix(model.A(), model.C(), N);
}

Matrix powers_matrix(const Matrix& A, Eigen::Index N) {
  return observability_matrix(A, Matrix::Identity(A.rows(), A.cols()), N);
}

Matrix powers_matrix(const NormalizedModel& model, Eigen::Index N) { return powers_matrix(model.A(), N); }

Trajectory simulate(const StateSpaceModel& model, std::size_t steps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&](Eigen::Index size) {
    Vector v(size);
    for (Eigen::Index i = 0; i < size; ++i) v(i) = normal(rng);
    return v;
  };

  Trajectory traj;
  traj.seed = seed;
  traj.states.reserve(steps);
  traj.observations.reserve(steps);
  traj.noises.reserve(steps);

  Vector x = model.x0_mean() + cholesky_factor(model.V0()) * draw(model.n());
  for (std::size_t k = 0; k < steps; ++k) {
    Vector v = draw(model.m());
    traj.states.push_back(x);
    traj.observations.push_back(model.C() * x + model.D() * v);
    x = model.A() * x + model.B() * v;
    traj.noises.push_back(std::move(v));
  }
  return traj;
}

}  // namespace robkf
