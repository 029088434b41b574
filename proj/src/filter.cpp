#include "robkf/filter.hpp"

#include "robkf/divergence.hpp"
#include "robkf/error.hpp"

namespace robkf {

FilterTrajectory run_filter(const StateSpaceModel& model, const FilterConfig& config,
                            std::span<const Vector> observations) {
  const Matrix& A = model.A();
  const Matrix& B = model.B();
  const Matrix& C = model.C();
  const Matrix& D = model.D();
  const Matrix bbt = B * B.transpose();
  const Matrix ddt = D * D.transpose();

  FilterTrajectory out;
  out.estimates.reserve(observations.size());
  out.P_seq.reserve(observations.size());
  out.V_seq.reserve(observations.size());
  out.theta_seq.reserve(observations.size());
  out.gains.reserve(observations.size());

  Vector x = model.x0_mean();
  Matrix V = model.V0();
  for (std::size_t k = 0; k < observations.size(); ++k) {
    const Vector& y = observations[k];
    if (y.size() != model.p()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "observation " + std::to_string(k) + " has " + std::to_string(y.size()) +
                      " entries, expected " + std::to_string(model.p()));
    }
    const Matrix G = gain(model, V);
    x = A * x + G * (y - C * x);

    const Matrix innovation = C * V * C.transpose() + ddt;
    const Matrix P = symmetrize(A * V * A.transpose() - G * innovation * G.transpose() + bbt);

    double theta = 0.0;
    switch (config.kind()) {
      case RecursionKind::standard:
        V = P;
        break;
      case RecursionKind::robust:
        theta = solve_theta(P, config.tolerance(), config.tau());
        V = v_update(P, theta, config.tau());
        break;
      case RecursionKind::risk_sensitive:
        theta = config.theta();
        V = v_update(P, theta, config.tau());
        break;
    }

    out.estimates.push_back(x);
    out.P_seq.push_back(P);
    out.V_seq.push_back(V);
    out.theta_seq.push_back(theta);
    out.gains.push_back(G);
  }
  return out;
}

FilterComparison compare_filters(const StateSpaceModel& model, std::span<const NamedFilter> filters,
                                 std::size_t steps, std::uint64_t seed) {
  if (filters.empty()) {
    throw Error(ErrorCode::DomainViolation, "compare_filters needs at least one filter");
  }
  FilterComparison cmp;
  cmp.simulation = simulate(model, steps, seed);
  for (const NamedFilter& f : filters) {
    cmp.labels.push_back(f.label);
    cmp.runs.push_back(run_filter(model, f.config, cmp.simulation.observations));
  }
  return cmp;
}

}  // namespace robkf
