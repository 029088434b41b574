#include "robkf/divergence.hpp"

#include "robkf/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace robkf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_theta_domain(double theta, double sigma_max, Tau tau) {
  if (!(theta >= 0.0) || !std::isfinite(theta)) {
    throw Error(ErrorCode::DomainViolation, "theta must be finite and nonnegative, got " + std::to_string(theta));
  }
  if (!tau.is_one() && theta * (1.0 - tau.value()) * sigma_max >= 1.0) {
    throw Error(ErrorCode::DomainViolation,
                "theta (1 - tau) sigma_1(P) must be below 1, got " +
                    std::to_string(theta * (1.0 - tau.value()) * sigma_max));
  }
}

// Per-eigenvalue term of gamma_tau. x = theta * lambda.
double gamma_term(double x, double tau) {
  if (tau == 0.0) return std::log1p(-x) + x / (1.0 - x);
  if (tau == 1.0) return x * std::exp(x) - std::expm1(x);
  // (I - theta (1-tau) P)^{1/(tau-1)} evaluated per eigenvalue; the trace
  // expression collapses to (w (x - 1) + 1) / tau.
  const double w = std::exp(-std::log1p(-(1.0 - tau) * x) / (1.0 - tau));
  return (w * (x - 1.0) + 1.0) / tau;
}

}  // namespace

Tau::Tau(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw Error(ErrorCode::DomainViolation, "tau must lie in [0, 1], got " + std::to_string(value));
  }
}

GaussianDensity::GaussianDensity(Vector m, Matrix c) : mean(std::move(m)), cov(std::move(c)) {
  if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
    throw Error(ErrorCode::DimensionMismatch, "covariance and mean dimensions differ");
  }
  if (!is_positive_definite(cov)) {
    throw Error(ErrorCode::NotSPD, "covariance is not positive definite");
  }
}

double tau_divergence(const GaussianDensity& f_tilde, const GaussianDensity& f, Tau tau) {
  if (f_tilde.mean.size() != f.mean.size()) {
    throw Error(ErrorCode::DimensionMismatch, "densities have different dimensions");
  }
  const Matrix L = cholesky_factor(f.cov);
  const auto tri = L.triangularView<Eigen::Lower>();
  const Vector dm = f.mean - f_tilde.mean;
  const double mean_term = tri.solve(dm).squaredNorm();

  // L^{-1} K~ L^{-T}; its spectrum is that of K~ K^{-1}.
  Matrix whitened = tri.solve(tri.solve(f_tilde.cov).transpose());
  const Vector mu = symmetric_eigenvalues(whitened);

  const double t = tau.value();
  double trace = 0.0;
  if (tau.is_kl()) {
    for (double v : mu) trace += -std::log(v) + v - 1.0;
    return mean_term + trace;
  }
  if (tau.is_one()) {
    if (dm.cwiseAbs().maxCoeff() > 1e-12) return kInf;
    for (double v : mu) trace += v * std::log(v) - v + 1.0;
    return trace;
  }
  for (double v : mu) {
    trace += std::pow(v, t) / (t * (t - 1.0)) + v / (1.0 - t) + 1.0 / t;
  }
  return mean_term / (1.0 - t) + trace;
}

double theta_limit(const Matrix& P, Tau tau) {
  if (tau.is_one()) return kInf;
  return 1.0 / ((1.0 - tau.value()) * max_eigenvalue(P));
}

double gamma_from_spectrum(const Vector& eigenvalues, double theta, Tau tau) {
  require_theta_domain(theta, eigenvalues.maxCoeff(), tau);
  if (theta == 0.0) return 0.0;
  double sum = 0.0;
  for (double lambda : eigenvalues) sum += gamma_term(theta * lambda, tau.value());
  return sum;
}

double gamma(const Matrix& P, double theta, Tau tau) {
  return gamma_from_spectrum(symmetric_eigenvalues(P), theta, tau);
}

double solve_theta(const Matrix& P, double c, Tau tau) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(ErrorCode::DomainViolation, "tolerance c must be positive, got " + std::to_string(c));
  }
  const Vector spectrum = symmetric_eigenvalues(P);
  const double sigma_max = spectrum.maxCoeff();
  if (!(spectrum.minCoeff() > 0.0)) {
    throw Error(ErrorCode::NotSPD, "solve_theta requires a positive definite P");
  }
  auto g = [&](double theta) { return gamma_from_spectrum(spectrum, theta, tau); };

  double lo = 0.0;
  double hi = 0.0;
  if (!tau.is_one()) {
    hi = (1.0 - 1e-12) / ((1.0 - tau.value()) * sigma_max);
    if (g(hi) < c) {
      throw Error(ErrorCode::ToleranceUnreachable,
                  "tolerance " + std::to_string(c) + " exceeds gamma on the admissible theta interval");
    }
  } else {
    hi = 1.0 / sigma_max;
    int doublings = 0;
    while (g(hi) < c) {
      hi *= 2.0;
      if (++doublings > 2000 || !std::isfinite(hi)) {
        throw Error(ErrorCode::NonConvergence, "could not bracket theta");
      }
    }
  }

  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) < c) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double g_lo = lo > 0.0 ? g(lo) : 0.0;
  const double g_hi = g(hi);
  const double theta = std::abs(g_lo - c) < std::abs(g_hi - c) && lo > 0.0 ? lo : hi;
  const double residual = std::abs(g(theta) - c);
  if (residual > 1e-10 * std::max(1.0, c)) {
    throw Error(ErrorCode::NonConvergence,
                "theta bisection residual " + std::to_string(residual) + " above tolerance");
  }
  return theta;
}

Matrix v_update_with_factor(const Matrix& factor, double theta, Tau tau) {
  const Matrix gram = symmetrize(factor.transpose() * factor);
  const Vector spectrum = symmetric_eigenvalues(gram);
  require_theta_domain(theta, spectrum.maxCoeff(), tau);
  const double t = tau.value();
  Matrix inner;
  if (tau.is_one()) {
    inner = spectral_apply(gram, [theta](double s) { return std::exp(theta * s); });
  } else {
    inner = spectral_apply(gram, [theta, t](double s) {
      return std::exp(-std::log1p(-theta * (1.0 - t) * s) / (1.0 - t));
    });
  }
  Matrix V = symmetrize(factor * inner * factor.transpose());
  if (!V.allFinite()) {
    throw Error(ErrorCode::DomainViolation, "least-favorable covariance overflows double precision");
  }
  return V;
}

Matrix v_update(const Matrix& P, double theta, Tau tau) {
  if (theta == 0.0) {
    require_theta_domain(theta, 0.0, tau);
    return symmetrize(P);
  }
  return v_update_with_factor(cholesky_factor(P), theta, tau);
}

Matrix phi_gap(const Matrix& P, const Matrix& V) {
  if (P.rows() != V.rows() || P.cols() != V.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "P and V differ in shape");
  }
  const double gap = min_eigenvalue(V - P);
  if (gap < -1e-10) {
    throw Error(ErrorCode::NotOrdered, "V - P has eigenvalue " + std::to_string(gap));
  }
  return symmetrize(spd_inverse(P) - spd_inverse(V));
}

double phi_upper_bound(double theta, Tau tau, double d_bar) {
  if (!(d_bar > 0.0)) {
    throw Error(ErrorCode::DomainViolation, "d_bar must be positive");
  }
  require_theta_domain(theta, d_bar, tau);
  if (tau.is_one()) return -std::expm1(-theta * d_bar) / d_bar;
  const double t = tau.value();
  return -std::expm1(std::log1p(-theta * (1.0 - t) * d_bar) / (1.0 - t)) / d_bar;
}

double max_theta_for_gap(double phi, Tau tau, double d_bar) {
  if (!(d_bar > 0.0) || !(phi > 0.0) || !(d_bar * phi < 1.0)) {
    throw Error(ErrorCode::DomainViolation,
                "need d_bar > 0, phi > 0 and d_bar * phi < 1, got d_bar * phi = " + std::to_string(d_bar * phi));
  }
  const double log_slack = std::log1p(-d_bar * phi);
  if (tau.is_one()) return -log_slack / d_bar;
  const double t = tau.value();
  return -std::expm1((1.0 - t) * log_slack) / ((1.0 - t) * d_bar);
}

}  // namespace robkf
