#pragma once

#include "robkf/linalg.hpp"

namespace robkf {

/// Divergence family parameter, 0 <= tau <= 1. Throws DomainViolation otherwise.
class Tau {
 public:
  explicit Tau(double value);

  double value() const noexcept { return value_; }
  bool is_kl() const noexcept { return value_ == 0.0; }
  bool is_one() const noexcept { return value_ == 1.0; }

  friend bool operator==(Tau, Tau) = default;

 private:
  double value_;
};

/// Gaussian density N(mean, cov). Throws DimensionMismatch or NotSPD.
struct GaussianDensity {
  GaussianDensity(Vector mean, Matrix cov);

  Vector mean;
  Matrix cov;
};

/// D_tau(f_tilde || f). Returns +inf for tau = 1 when the means differ (by more
/// than 1e-12 in any entry). The tau = 0 member omits the 1/2 of the usual
/// Kullback-Leibler convention, so it equals twice KL(f_tilde || f).
double tau_divergence(const GaussianDensity& f_tilde, const GaussianDensity& f, Tau tau);

/// Supremum of admissible theta for a given P: 1 / ((1 - tau) sigma_1(P)),
/// or +inf when tau = 1.
double theta_limit(const Matrix& P, Tau tau);

/// gamma_tau(P, theta), the divergence budget spent by the least-favorable
/// density when the risk parameter is theta. Depends on P through its spectrum.
/// Throws DomainViolation when theta < 0 or theta >= theta_limit(P, tau).
double gamma(const Matrix& P, double theta, Tau tau);

/// Same as gamma() for a precomputed spectrum of P.
double gamma_from_spectrum(const Vector& eigenvalues, double theta, Tau tau);

/// Solves c = gamma_tau(P, theta) for theta by bisection. Throws DomainViolation
/// for c <= 0, ToleranceUnreachable when c exceeds what the admissible interval
/// reaches numerically, NonConvergence if the residual check fails.
double solve_theta(const Matrix& P, double c, Tau tau);

/// Least-favorable covariance V = L (I - theta (1-tau) L^T L)^{1/(tau-1)} L^T
/// (tau < 1) or L exp(theta L^T L) L^T (tau = 1), with L the Cholesky factor of P.
Matrix v_update(const Matrix& P, double theta, Tau tau);

/// v_update() with a caller-supplied factor, P = factor * factor^T.
Matrix v_update_with_factor(const Matrix& factor, double theta, Tau tau);

/// P^{-1} - V^{-1}. Throws NotOrdered when V - P has an eigenvalue below -1e-10.
Matrix phi_gap(const Matrix& P, const Matrix& V);

/// Scalar f_theta(d_bar) with phi_gap(P, v_update(P, theta, tau)) <= f_theta(d_bar) I
/// whenever P >= d_bar I.
double phi_upper_bound(double theta, Tau tau, double d_bar);

/// Largest theta with phi_upper_bound(theta, tau, d_bar) <= phi. Requires d_bar * phi < 1.
double max_theta_for_gap(double phi, Tau tau, double d_bar);

}  // namespace robkf
