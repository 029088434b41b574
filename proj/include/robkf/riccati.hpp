#pragma once

#include "robkf/divergence.hpp"
#include "robkf/error.hpp"
#include "robkf/model.hpp"

namespace robkf {

enum class RecursionKind { standard, robust, risk_sensitive };

/// Which covariance recursion to run and its parameter: nothing for the
/// standard Kalman recursion, a tolerance c for the robust one, a fixed risk
/// parameter theta for the risk-sensitive one.
class Recursion {
 public:
  static Recursion standard();
  /// Throws DomainViolation unless c > 0.
  static Recursion robust(Tau tau, double c);
  /// Throws DomainViolation unless theta > 0.
  static Recursion risk_sensitive(Tau tau, double theta);

  RecursionKind kind() const noexcept { return kind_; }
  Tau tau() const noexcept { return tau_; }
  double tolerance() const noexcept { return c_; }
  double theta() const noexcept { return theta_; }

 private:
  Recursion(RecursionKind kind, Tau tau, double c, double theta)
      : kind_(kind), tau_(tau), c_(c), theta_(theta) {}

  RecursionKind kind_;
  Tau tau_;
  double c_;
  double theta_;
};

/// One pass of the covariance recursion from a least-favorable covariance V_k:
/// gain G_k, P_{k+1}, theta_k, V_{k+1} and Phi_k = P_{k+1}^{-1} - V_{k+1}^{-1}.
struct RiccatiStep {
  Matrix G;
  Matrix P_next;
  double theta = 0.0;
  Matrix V;
  Matrix Phi;
};

/// r(P) = A (P^{-1} + C^T (D D^T)^{-1} C)^{-1} A^T + B B^T, evaluated in
/// covariance form so that singular P (e.g. B B^T) is accepted.
Matrix standard_riccati(const NormalizedModel& model, const Matrix& P);

/// G = (A V C^T + B D^T)(C V C^T + D D^T)^{-1}
Matrix gain(const StateSpaceModel& model, const Matrix& V);
Matrix gain(const NormalizedModel& model, const Matrix& V);

/// A (V^{-1} + C^T (D D^T)^{-1} C)^{-1} A^T + B B^T in information form.
Matrix information_propagate(const NormalizedModel& model, const Matrix& V);

/// Risk-sensitive map A (P^{-1} - Phi + C^T (D D^T)^{-1} C)^{-1} A^T + B B^T.
/// Throws DomainViolation when the bracketed matrix is not positive definite.
Matrix risk_sensitive_map(const NormalizedModel& model, const Matrix& P, const Matrix& Phi);

/// V-first advance: G and P_next from V, then theta and the next V per `recursion`.
RiccatiStep advance(const NormalizedModel& model, const Matrix& V, const Recursion& recursion);

/// P_{k+1} = r_{tau,c}(P_k): V_k = v_update(P_k, solve_theta(P_k, c)), then advance().
/// The returned V, theta and Phi belong to P_next.
RiccatiStep robust_step(const NormalizedModel& model, const Matrix& P, double c, Tau tau);

/// Fixed-theta counterpart of robust_step(). For tau < 1 throws DomainViolation
/// once sigma_1(P) reaches 1 / (theta (1 - tau)).
RiccatiStep risk_sensitive_step(const NormalizedModel& model, const Matrix& P, double theta, Tau tau);

struct FixedPointReport {
  Matrix P_star;
  Matrix V_star;
  double theta_star = 0.0;
  Matrix G_star;
  int iterations = 0;
  double final_step_distance = 0.0;
  double spectral_radius_closed_loop = 0.0;
  /// ||P - (A-GC) V (A-GC)^T - B B^T - G D D^T G^T||_F / ||P||_F at the last iterate.
  double lyapunov_residual = 0.0;
};

class MaxIterExceeded : public Error {
 public:
  MaxIterExceeded(const std::string& what, FixedPointReport last)
      : Error(ErrorCode::MaxIterExceeded, what), last_(std::move(last)) {}

  const FixedPointReport& last_iterate() const noexcept { return last_; }

 private:
  FixedPointReport last_;
};

/// Runs `recursion` from V_0 = start until d_T(P_k, P_{k+1}) <= tol. For the
/// standard recursion `start` is P_0. Throws MaxIterExceeded with the last iterate.
FixedPointReport iterate_to_fixed_point(const NormalizedModel& model, const Matrix& start,
                                        const Recursion& recursion, double tol = 1e-9,
                                        int max_iter = 10000);

}  // namespace robkf
