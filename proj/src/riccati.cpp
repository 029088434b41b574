#include "robkf/riccati.hpp"

#include "robkf/thompson.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace robkf {

Recursion Recursion::standard() { return Recursion(RecursionKind::standard, Tau(0.0), 0.0, 0.0); }

Recursion Recursion::robust(Tau tau, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(ErrorCode::DomainViolation, "robust recursion needs c > 0, got " + std::to_string(c));
  }
  return Recursion(RecursionKind::robust, tau, c, 0.0);
}

Recursion Recursion::risk_sensitive(Tau tau, double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw Error(ErrorCode::DomainViolation,
                "risk-sensitive recursion needs theta > 0, got " + std::to_string(theta));
  }
  return Recursion(RecursionKind::risk_sensitive, tau, 0.0, theta);
}

Matrix standard_riccati(const NormalizedModel& model, const Matrix& P) {
  const Matrix& A = model.A();
  const Matrix& C = model.C();
  const Matrix PCt = P * C.transpose();
  Eigen::LLT<Matrix> innovation(symmetrize(C * PCt + model.measurement_noise()));
  const Matrix posterior = P - PCt * innovation.solve(PCt.transpose());
  return symmetrize(A * posterior * A.transpose() + model.process_noise());
}

Matrix gain(const StateSpaceModel& model, const Matrix& V) {
  const Matrix& A = model.A();
  const Matrix& B = model.B();
  const Matrix& C = model.C();
  const Matrix& D = model.D();
  Eigen::LLT<Matrix> innovation(symmetrize(C * V * C.transpose() + D * D.transpose()));
  const Matrix cross = A * V * C.transpose() + B * D.transpose();
  return innovation.solve(cross.transpose()).transpose();
}

Matrix gain(const NormalizedModel& model, const Matrix& V) { return gain(model.state_space(), V); }

Matrix information_propagate(const NormalizedModel& model, const Matrix& V) {
  const Matrix information = symmetrize(spd_inverse(V) + model.observation_information());
  const Matrix& A = model.A();
  Eigen::LLT<Matrix> llt(information);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotSPD, "V^{-1} + C^T (D D^T)^{-1} C is not positive definite");
  }
  return symmetrize(A * llt.solve(A.transpose()) + model.process_noise());
}

Matrix risk_sensitive_map(const NormalizedModel& model, const Matrix& P, const Matrix& Phi) {
  const Matrix information = symmetrize(spd_inverse(P) - Phi + model.observation_information());
  Eigen::LLT<Matrix> llt(information);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::DomainViolation, "P^{-1} - Phi + C^T (D D^T)^{-1} C is not positive definite");
  }
  const Matrix& A = model.A();
  return symmetrize(A * llt.solve(A.transpose()) + model.process_noise());
}

RiccatiStep advance(const NormalizedModel& model, const Matrix& V, const Recursion& recursion) {
  RiccatiStep step;
  step.G = gain(model, V);
  switch (recursion.kind()) {
    case RecursionKind::standard:
      step.P_next = standard_riccati(model, V);
      step.theta = 0.0;
      step.V = step.P_next;
      step.Phi = Matrix::Zero(model.n(), model.n());
      return step;
    case RecursionKind::robust:
      step.P_next = information_propagate(model, V);
      step.theta = solve_theta(step.P_next, recursion.tolerance(), recursion.tau());
      break;
    case RecursionKind::risk_sensitive:
      step.P_next = information_propagate(model, V);
      step.theta = recursion.theta();
      break;
  }
  step.V = v_update(step.P_next, step.theta, recursion.tau());
  step.Phi = phi_gap(step.P_next, step.V);
  return step;
}

RiccatiStep robust_step(const NormalizedModel& model, const Matrix& P, double c, Tau tau) {
  const Matrix V = v_update(P, solve_theta(P, c, tau), tau);
  return advance(model, V, Recursion::robust(tau, c));
}

RiccatiStep risk_sensitive_step(const NormalizedModel& model, const Matrix& P, double theta, Tau tau) {
  const Matrix V = v_update(P, theta, tau);
  return advance(model, V, Recursion::risk_sensitive(tau, theta));
}

namespace {

FixedPointReport make_report(const NormalizedModel& model, const RiccatiStep& step, const Matrix& V_prev,
                             int iterations, double distance) {
  FixedPointReport report;
  report.P_star = step.P_next;
  report.V_star = step.V;
  report.theta_star = step.theta;
  report.G_star = gain(model, step.V);
  report.iterations = iterations;
  report.final_step_distance = distance;
  const Matrix closed_loop = model.A() - report.G_star * model.C();
  report.spectral_radius_closed_loop = spectral_radius(closed_loop);

  // The identity holds exactly for the pair (V_prev, P_next); at a fixed point
  // V_prev equals V_star.
  const Matrix loop_prev = model.A() - step.G * model.C();
  const Matrix rebuilt = loop_prev * V_prev * loop_prev.transpose() + model.process_noise() +
                         step.G * model.measurement_noise() * step.G.transpose();
  report.lyapunov_residual = (step.P_next - rebuilt).norm() / step.P_next.norm();
  return report;
}

}  // namespace

FixedPointReport iterate_to_fixed_point(const NormalizedModel& model, const Matrix& start,
                                        const Recursion& recursion, double tol, int max_iter) {
  if (!(tol > 0.0)) {
    throw Error(ErrorCode::DomainViolation, "tol must be positive");
  }
  if (!is_positive_definite(start)) {
    throw Error(ErrorCode::NotSPD, "start matrix must be positive definite");
  }
  Matrix V = symmetrize(start);
  Matrix P_prev;
  double distance = std::numeric_limits<double>::infinity();
  for (int it = 1;; ++it) {
    RiccatiStep step = advance(model, V, recursion);
    if (it > 1) {
      distance = thompson_metric(P_prev, step.P_next);
      if (distance <= tol) return make_report(model, step, V, it, distance);
    }
    if (it >= max_iter) {
      throw MaxIterExceeded("no convergence within " + std::to_string(max_iter) + " iterations",
                            make_report(model, step, V, it, distance));
    }
    P_prev = step.P_next;
    V = step.V;
  }
}

}  // namespace robkf
