#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "robkf/error.hpp"
#include "robkf/thompson.hpp"
#include "test_support.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace robkf;
using robkf::testing::random_invertible;
using robkf::testing::random_matrix;
using robkf::testing::random_spd;

namespace {

// max |log lambda| over the (real) eigenvalues of P^{-1} Q, via the
// nonsymmetric solver.
double metric_oracle(const Matrix& P, const Matrix& Q) {
  const Eigen::EigenSolver<Matrix> es(P.inverse() * Q);
  double d = 0.0;
  for (Eigen::Index i = 0; i < P.rows(); ++i) d = std::max(d, std::abs(std::log(es.eigenvalues()(i).real())));
  return d;
}

Matrix h_map(const Matrix& M, const Matrix& W1, const Matrix& W2, const Matrix& P) {
  return symmetrize(M * (P.inverse() + W1).inverse() * M.transpose() + W2);
}

}  // namespace

TEST_CASE("simple values") {
  const Matrix I = Matrix::Identity(3, 3);
  CHECK(thompson_metric(I, I) == 0.0);
  CHECK(thompson_metric(I, 2.0 * I) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  const Matrix D1 = Eigen::Vector3d(1.0, 2.0, 4.0).asDiagonal();
  const Matrix D2 = Eigen::Vector3d(3.0, 1.0, 4.0).asDiagonal();
  CHECK(thompson_metric(D1, D2) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
}

TEST_CASE("input checks") {
  const Matrix I = Matrix::Identity(2, 2);
  Matrix bad = I;
  bad(1, 1) = -1.0;
  CHECK_THROWS_AS(thompson_metric(I, Matrix::Identity(3, 3)), Error);
  try {
    thompson_metric(I, bad);
    FAIL("expected NotSPD");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotSPD);
  }
}

TEST_CASE("agrees with the nonsymmetric eigenvalue route") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix P = random_spd(4, rng);
    const Matrix Q = random_spd(4, rng);
    CHECK(thompson_metric(P, Q) == doctest::Approx(metric_oracle(P, Q)).epsilon(1e-9));
  }
}

TEST_CASE("metric axioms") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix P = random_spd(3, rng);
    const Matrix Q = random_spd(3, rng);
    const Matrix R = random_spd(3, rng);
    const double pq = thompson_metric(P, Q);
    CHECK(pq >= 0.0);
    CHECK(thompson_metric(P, P) < 1e-12);
    CHECK(std::abs(pq - thompson_metric(Q, P)) < 1e-9);
    CHECK(pq <= thompson_metric(P, R) + thompson_metric(R, Q) + 1e-10);
  }
}

TEST_CASE("invariance under inversion and congruence") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix P = random_spd(3, rng);
    const Matrix Q = random_spd(3, rng);
    const Matrix M = random_invertible(3, rng);
    const double d = thompson_metric(P, Q);
    CHECK(std::abs(thompson_metric(P.inverse(), Q.inverse()) - d) < 1e-9);
    CHECK(std::abs(thompson_metric(M * P * M.transpose(), M * Q * M.transpose()) - d) < 1e-9);
  }
}

TEST_CASE("contraction bound values") {
  const Matrix I = Matrix::Identity(2, 2);
  CHECK(contraction_bound(Matrix::Zero(2, 2), I, I) == 0.0);
  const double expected = std::pow(1.0 / (1.0 + std::sqrt(2.0)), 2);
  CHECK(contraction_bound(I, I, I) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("empirical contraction never exceeds the bound") {
  std::mt19937_64 rng(24);
  for (int instance = 0; instance < 10; ++instance) {
    const Matrix M = random_matrix(3, 3, rng) * 1.5;
    const Matrix W1 = random_spd(3, rng);
    const Matrix W2 = random_spd(3, rng);
    const double bound = contraction_bound(M, W1, W2);
    CHECK(bound < 1.0);
    for (int pair = 0; pair < 100; ++pair) {
      const Matrix P = random_spd(3, rng, 3.0);
      const Matrix Q = random_spd(3, rng, 3.0);
      const double ratio = thompson_metric(h_map(M, W1, W2, P), h_map(M, W1, W2, Q)) / thompson_metric(P, Q);
      CHECK(ratio <= bound + 1e-9);
    }
  }
}
