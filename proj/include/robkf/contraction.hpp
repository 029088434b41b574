#pragma once

#include "robkf/divergence.hpp"
#include "robkf/model.hpp"
#include "robkf/thompson.hpp"

#include <optional>

namespace robkf {

/// The model lifted to blocks of N consecutive steps, x^d_k = x_{kN}.
///
/// Stacked vectors run backwards in time within a block (newest sample on top),
/// so H_N and L_N are strictly upper block triangular with block (i, j) equal
/// to C A^{j-i-1} B and A^{j-i-1} B respectively.
struct DownsampledSystem {
  Eigen::Index N = 0;
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  Eigen::Index p = 0;

  Matrix A_N;      // A^N, n x n
  Matrix R_N;      // n x Nm
  Matrix O_N;      // Np x n
  Matrix O_N_R;    // Nn x n
  Matrix D_N;      // Np x Nm, I_N (x) D
  Matrix H_N;      // Np x Nm
  Matrix L_N;      // Nn x Nm
  Matrix J_N;      // Nn x n
  Matrix Omega_N;  // n x n

  /// 1 / sigma_1(X) with X = L_N (I + H_N^T (D_N D_N^T)^{-1} H_N)^{-1} L_N^T;
  /// +inf when X vanishes (N = 1).
  double tilde_phi_N = 0.0;

  Matrix output_covariance;   // D_N D_N^T + H_N H_N^T
  Matrix noise_information;   // I + H_N^T (D_N D_N^T)^{-1} H_N
  Matrix coupling;            // X above

  bool undersized() const noexcept { return N < n; }
};

/// Throws NotObservable / NotReachable when N >= n and Omega_N or W_0 is not
/// positive definite. For N < n the degenerate blocks are returned as is.
DownsampledSystem build_downsampled(const NormalizedModel& model, Eigen::Index N);

struct DownsampledGramians {
  Matrix Omega;  // Omega_N + J_N^T S^{-1} J_N
  Matrix W;      // R_N Q R_N^T
};

/// Omega and W for a block-diagonal bar_phi (Nn x Nn, blocks n x n, PSD).
/// Throws DomainViolation when bar_phi is malformed or Q loses positive definiteness.
DownsampledGramians downsampled_gramians(const DownsampledSystem& ds, const Matrix& bar_phi);

/// r^d(P) = alpha (P^{-1} + Omega)^{-1} alpha^T + W, which equals N applications
/// of the one-step risk-sensitive map with the blocks of bar_phi. Blocks are
/// listed newest step first: block 0 acts in the last of the N steps.
Matrix downsampled_map(const DownsampledSystem& ds, const Matrix& bar_phi, const Matrix& P);

/// Largest phi in (0, tilde_phi_N) with Omega_{phi I} and W_{phi I} positive
/// definite, located by bisection to relative width 1e-6. Throws SearchFailed.
double find_phi_N(const DownsampledSystem& ds);

/// q steps of the standard Riccati map from B B^T.
Matrix standard_sequence(const NormalizedModel& model, int q);

enum class CertificateMode { robust, risk_sensitive };

struct ConvergenceCertificate {
  CertificateMode mode = CertificateMode::robust;
  Tau tau{0.0};
  int q = 0;
  Eigen::Index N = 0;
  Matrix P_bar_q;
  double sigma_n = 0.0;
  double tilde_phi_N = 0.0;
  double phi_N = 0.0;
  double theta_bar = 0.0;
  std::optional<double> c_max;      // robust mode
  std::optional<double> theta_max;  // risk-sensitive mode, tau = 1
};

/// Largest tolerance (robust) or risk parameter (risk-sensitive, tau = 1) for
/// which the N-fold map is certified strictly contractive from step q on.
/// Throws RiskSensitiveModeUnsupported for risk-sensitive mode with tau < 1,
/// DomainViolation for N < n, q < 1 or sigma_n(P_bar_q) phi_N >= 1.
ConvergenceCertificate certify(const NormalizedModel& model, Tau tau, int q, Eigen::Index N,
                               CertificateMode mode = CertificateMode::robust);

/// max(n, 50)
Eigen::Index default_block_length(const NormalizedModel& model);

}  // namespace robkf
