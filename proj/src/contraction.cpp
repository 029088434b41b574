#include "robkf/contraction.hpp"

#include "robkf/error.hpp"
#include "robkf/riccati.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace robkf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix matrix_power(const Matrix& A, Eigen::Index k) {
  Matrix out = Matrix::Identity(A.rows(), A.cols());
  for (Eigen::Index i = 0; i < k; ++i) out = out * A;
  return out;
}

// (I - bar_phi X)^{-1} bar_phi, i.e. -S^{-1} without inverting bar_phi.
Matrix negative_schur_inverse(const DownsampledSystem& ds, const Matrix& bar_phi) {
  const Eigen::Index size = bar_phi.rows();
  const Matrix lhs = Matrix::Identity(size, size) - bar_phi * ds.coupling;
  return symmetrize(lhs.partialPivLu().solve(bar_phi));
}

void check_bar_phi(const DownsampledSystem& ds, const Matrix& bar_phi) {
  const Eigen::Index size = ds.N * ds.n;
  if (bar_phi.rows() != size || bar_phi.cols() != size) {
    throw Error(ErrorCode::DomainViolation,
                "bar_phi must be " + std::to_string(size) + "x" + std::to_string(size));
  }
  const double scale = std::max(1.0, bar_phi.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ds.N; ++i) {
    for (Eigen::Index j = 0; j < ds.N; ++j) {
      if (i == j) continue;
      if (bar_phi.block(i * ds.n, j * ds.n, ds.n, ds.n).cwiseAbs().maxCoeff() > 1e-14 * scale) {
        throw Error(ErrorCode::DomainViolation, "bar_phi is not block diagonal");
      }
    }
  }
  if (min_eigenvalue(bar_phi) < -1e-12 * scale) {
    throw Error(ErrorCode::DomainViolation, "bar_phi is not positive semidefinite");
  }
}

}  // namespace

DownsampledSystem build_downsampled(const NormalizedModel& model, Eigen::Index N) {
  if (N < 1) {
    throw Error(ErrorCode::DomainViolation, "block length N must be positive");
  }
  DownsampledSystem ds;
  ds.N = N;
  ds.n = model.n();
  ds.m = model.m();
  ds.p = model.p();
  const Eigen::Index n = ds.n, m = ds.m, p = ds.p;
  const Matrix& A = model.A();
  const Matrix& B = model.B();
  const Matrix& C = model.C();

  ds.A_N = matrix_power(A, N);
  ds.R_N = reachability_matrix(model, N);
  ds.O_N = observability_matrix(model, N);
  ds.O_N_R = powers_matrix(model, N);
  ds.D_N = Matrix::Zero(N * p, N * m);
  for (Eigen::Index i = 0; i < N; ++i) ds.D_N.block(i * p, i * m, p, m) = model.D();

  // Markov parameters L_k = A^{k-1} B and H_k = C L_k for k = 1 .. N-1.
  std::vector<Matrix> L_blocks;
  L_blocks.reserve(static_cast<std::size_t>(N));
  Matrix power_times_B = B;
  for (Eigen::Index k = 1; k < N; ++k) {
    L_blocks.push_back(power_times_B);
    power_times_B = A * power_times_B;
  }
  ds.H_N = Matrix::Zero(N * p, N * m);
  ds.L_N = Matrix::Zero(N * n, N * m);
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = i + 1; j < N; ++j) {
      const Matrix& Lk = L_blocks[static_cast<std::size_t>(j - i - 1)];
      ds.L_N.block(i * n, j * m, n, m) = Lk;
      ds.H_N.block(i * p, j * m, p, m) = C * Lk;
    }
  }

  const Matrix ddt = repeat_block_diagonal(model.measurement_noise(), N);
  Eigen::LLT<Matrix> ddt_llt(ddt);
  ds.noise_information = symmetrize(Matrix::Identity(N * m, N * m) + ds.H_N.transpose() * ddt_llt.solve(ds.H_N));
  Eigen::LLT<Matrix> noise_llt(ds.noise_information);
  ds.coupling = symmetrize(ds.L_N * noise_llt.solve(ds.L_N.transpose()));
  const double coupling_norm = max_eigenvalue(ds.coupling);
  ds.tilde_phi_N = coupling_norm > 0.0 ? 1.0 / coupling_norm : kInf;

  ds.output_covariance = symmetrize(ds.D_N * ds.D_N.transpose() + ds.H_N * ds.H_N.transpose());
  Eigen::LLT<Matrix> out_llt(ds.output_covariance);
  ds.Omega_N = symmetrize(ds.O_N.transpose() * out_llt.solve(ds.O_N));
  ds.J_N = ds.O_N_R - ds.L_N * ds.H_N.transpose() * out_llt.solve(ds.O_N);

  if (!ds.undersized()) {
    if (!is_positive_definite(ds.Omega_N)) {
      throw Error(ErrorCode::NotObservable, "Omega_N is not positive definite");
    }
    const Matrix W0 = ds.R_N * noise_llt.solve(ds.R_N.transpose());
    if (!is_positive_definite(W0)) {
      throw Error(ErrorCode::NotReachable, "W at bar_phi = 0 is not positive definite");
    }
  }
  return ds;
}

DownsampledGramians downsampled_gramians(const DownsampledSystem& ds, const Matrix& bar_phi) {
  check_bar_phi(ds, bar_phi);
  const Matrix q_inverse = symmetrize(ds.noise_information - ds.L_N.transpose() * bar_phi * ds.L_N);
  Eigen::LLT<Matrix> q_llt(q_inverse);
  if (q_llt.info() != Eigen::Success) {
    throw Error(ErrorCode::DomainViolation, "bar_phi too large: Q is not positive definite");
  }
  DownsampledGramians g;
  g.W = symmetrize(ds.R_N * q_llt.solve(ds.R_N.transpose()));
  g.Omega = symmetrize(ds.Omega_N - ds.J_N.transpose() * negative_schur_inverse(ds, bar_phi) * ds.J_N);
  return g;
}

Matrix downsampled_map(const DownsampledSystem& ds, const Matrix& bar_phi, const Matrix& P) {
  const DownsampledGramians g = downsampled_gramians(ds, bar_phi);

  // Block elimination of K [Z1; Z2] = [O_N; O_N_R] with
  // K = [[D_N D_N^T + H_N H_N^T, H_N L_N^T], [L_N H_N^T, -bar_phi^{-1} + L_N L_N^T]].
  const Matrix Z2 = -negative_schur_inverse(ds, bar_phi) * ds.J_N;
  Eigen::LLT<Matrix> out_llt(ds.output_covariance);
  const Matrix Z1 = out_llt.solve(ds.O_N - ds.H_N * ds.L_N.transpose() * Z2);
  const Matrix alpha = ds.A_N - ds.R_N * ((ds.D_N + ds.H_N).transpose() * Z1 + ds.L_N.transpose() * Z2);

  Eigen::LLT<Matrix> info(symmetrize(spd_inverse(P) + g.Omega));
  if (info.info() != Eigen::Success) {
    throw Error(ErrorCode::DomainViolation, "P^{-1} + Omega is not positive definite");
  }
  return symmetrize(alpha * info.solve(alpha.transpose()) + g.W);
}

double find_phi_N(const DownsampledSystem& ds) {
  const Eigen::Index size = ds.N * ds.n;
  const Matrix identity = Matrix::Identity(size, size);
  auto admissible = [&](double phi) {
    try {
      const DownsampledGramians g = downsampled_gramians(ds, phi * identity);
      return is_positive_definite(g.Omega) && is_positive_definite(g.W);
    } catch (const Error&) {
      return false;
    }
  };

  if (!admissible(0.0)) {
    throw Error(ErrorCode::SearchFailed, "Omega or W is singular already at bar_phi = 0");
  }
  double hi = 0.0;
  if (std::isfinite(ds.tilde_phi_N)) {
    hi = ds.tilde_phi_N * (1.0 - 1e-9);
  } else {
    hi = 1.0;
    while (admissible(hi)) {
      hi *= 2.0;
      if (!std::isfinite(hi)) throw Error(ErrorCode::SearchFailed, "no finite upper bracket for phi_N");
    }
  }
  if (admissible(hi)) return hi;

  double lo = 0.0;
  while (hi - lo > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (admissible(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (!(lo > 0.0)) {
    throw Error(ErrorCode::SearchFailed, "no admissible phi in (0, tilde_phi_N)");
  }
  return lo;
}

Matrix standard_sequence(const NormalizedModel& model, int q) {
  Matrix P = model.process_noise();
  for (int k = 0; k < q; ++k) P = standard_riccati(model, P);
  return P;
}

ConvergenceCertificate certify(const NormalizedModel& model, Tau tau, int q, Eigen::Index N,
                               CertificateMode mode) {
  if (mode == CertificateMode::risk_sensitive && !tau.is_one()) {
    throw Error(ErrorCode::RiskSensitiveModeUnsupported,
                "risk-sensitive certification is available for tau = 1 only");
  }
  if (q < 1) throw Error(ErrorCode::DomainViolation, "q must be positive");
  if (N < model.n()) {
    throw Error(ErrorCode::DomainViolation,
                "block length N = " + std::to_string(N) + " is below the state dimension");
  }

  ConvergenceCertificate cert;
  cert.mode = mode;
  cert.tau = tau;
  cert.q = q;
  cert.N = N;
  cert.P_bar_q = standard_sequence(model, q);
  cert.sigma_n = smallest_singular_value(cert.P_bar_q);
  if (!(cert.sigma_n > 0.0)) {
    throw Error(ErrorCode::DomainViolation, "P_bar_q is singular; increase q");
  }

  const DownsampledSystem ds = build_downsampled(model, N);
  cert.tilde_phi_N = ds.tilde_phi_N;
  cert.phi_N = find_phi_N(ds);
  if (cert.sigma_n * cert.phi_N >= 1.0) {
    throw Error(ErrorCode::DomainViolation, "sigma_n(P_bar_q) * phi_N >= 1");
  }
  cert.theta_bar = max_theta_for_gap(cert.phi_N, tau, cert.sigma_n);
  if (mode == CertificateMode::robust) {
    cert.c_max = gamma(cert.P_bar_q, cert.theta_bar, tau);
  } else {
    cert.theta_max = cert.theta_bar;
  }
  return cert;
}

Eigen::Index default_block_length(const NormalizedModel& model) {
  return std::max<Eigen::Index>(model.n(), 50);
}

}  // namespace robkf
