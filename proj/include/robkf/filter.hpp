#pragma once

#include "robkf/model.hpp"
#include "robkf/riccati.hpp"

#include <span>
#include <string>
#include <vector>

namespace robkf {

using FilterConfig = Recursion;

/// Entry k (0-based) holds the outcome of processing y_k:
/// estimates[k] = x^_{k+1}, P_seq[k] = P_{k+1}, V_seq[k] = V_{k+1},
/// theta_seq[k] = theta_k, gains[k] = G_k.
struct FilterTrajectory {
  std::vector<Vector> estimates;
  std::vector<Matrix> P_seq;
  std::vector<Matrix> V_seq;
  std::vector<double> theta_seq;
  std::vector<Matrix> gains;

  std::size_t size() const noexcept { return estimates.size(); }
};

/// Prediction-form filter x^_{k+1} = A x^_k + G_k (y_k - C x^_k), started at
/// x^_0 = x0_mean with V0 entering the first gain. Works on models with
/// B D^T != 0; the covariance update uses the gain form
/// P_{k+1} = A V_k A^T - G_k (C V_k C^T + D D^T) G_k^T + B B^T.
FilterTrajectory run_filter(const StateSpaceModel& model, const FilterConfig& config,
                            std::span<const Vector> observations);

struct NamedFilter {
  std::string label;
  FilterConfig config;
};

struct FilterComparison {
  Trajectory simulation;
  std::vector<std::string> labels;
  std::vector<FilterTrajectory> runs;
};

/// Simulates one nominal trajectory and runs every filter on its observations.
FilterComparison compare_filters(const StateSpaceModel& model, std::span<const NamedFilter> filters,
                                 std::size_t steps, std::uint64_t seed);

}  // namespace robkf
