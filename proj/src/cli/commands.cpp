#include "robkf/cli/commands.hpp"

#include "robkf/cli/io.hpp"
#include "robkf/contraction.hpp"
#include "robkf/error.hpp"
#include "robkf/filter.hpp"
#include "robkf/riccati.hpp"
#include "robkf/thompson.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

namespace robkf::cli {
namespace {

constexpr const char* kRngNote =
    "Noise is drawn with std::mt19937_64 seeded by --seed and std::normal_distribution; "
    "x0 ~ N(x0_mean, V0) through the Cholesky factor of V0.";

struct Manifest {
  std::string model_path;
  double tau = 0.0;
  std::optional<double> c;
  std::optional<double> theta;
  int q = 40;
  std::optional<long> N;
  std::size_t steps = 100;
  std::uint64_t seed = 0;
  double tol = 1e-9;
  int max_iter = 10000;
  std::string out_path;
  std::string mode = "robust";
  std::string kind = "standard";
  std::string obs_path;
  std::vector<std::string> filters;
  std::vector<std::string> matrix_files;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("robkf", sink);
  logger->set_pattern("robkf: %l: %v");
  const char* env = std::getenv("ROBKF_LOG");
  const std::string level = env ? env : "";
  if (level == "debug") {
    logger->set_level(spdlog::level::debug);
  } else if (level == "info") {
    logger->set_level(spdlog::level::info);
  } else if (level == "error") {
    logger->set_level(spdlog::level::err);
  } else {
    logger->set_level(spdlog::level::warn);
  }
  return logger;
}

// Writes to --out when given, otherwise to `out`.
template <typename Fn>
void emit(const Manifest& m, std::ostream& out, Fn&& write) {
  if (m.out_path.empty()) {
    write(out);
    return;
  }
  std::ofstream file(m.out_path);
  if (!file) throw Error(ErrorCode::IoError, "output: " + m.out_path + " not writable");
  write(file);
}

FilterConfig config_from(const std::string& kind, double tau, std::optional<double> c,
                         std::optional<double> theta) {
  if (kind == "standard") return Recursion::standard();
  if (kind == "robust") {
    if (!c) throw UsageError("--kind robust requires --c");
    return Recursion::robust(Tau(tau), *c);
  }
  if (kind == "risk_sensitive") {
    if (!theta) throw UsageError("--kind risk_sensitive requires --theta");
    return Recursion::risk_sensitive(Tau(tau), *theta);
  }
  throw UsageError("unknown kind '" + kind + "'");
}

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("bad number '" + text + "' in " + what);
  }
}

// [LABEL=]KIND[:TAU[:PARAM]]
NamedFilter parse_filter(const std::string& spec) {
  std::string body = spec;
  std::string label;
  if (auto eq = spec.find('='); eq != std::string::npos) {
    label = spec.substr(0, eq);
    body = spec.substr(eq + 1);
  }
  std::vector<std::string> parts;
  std::stringstream ss(body);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.empty()) throw UsageError("empty filter spec");
  const std::string& kind = parts[0];
  const double tau = parts.size() > 1 ? parse_number(parts[1], spec) : 0.0;
  std::optional<double> param;
  if (parts.size() > 2) param = parse_number(parts[2], spec);
  if (parts.size() > 3) throw UsageError("too many fields in filter spec '" + spec + "'");
  if (kind == "standard" && parts.size() > 1) throw UsageError("standard filter takes no parameters");
  FilterConfig config = config_from(kind, tau, param, param);
  if (label.empty()) label = body;
  return {label, config};
}

std::vector<NamedFilter> default_filter_set(const StateSpaceModel& model, const Manifest& m,
                                            spdlog::logger& log) {
  const NormalizedModel normalized = normalize(model);
  const Eigen::Index N = m.N ? *m.N : default_block_length(normalized);
  std::vector<NamedFilter> set{{"KF", Recursion::standard()}};
  const std::pair<double, const char*> taus[] = {{0.0, "RKF0"}, {0.5, "RKF05"}, {1.0, "RKF1"}};
  for (const auto& [tau, label] : taus) {
    const ConvergenceCertificate cert = certify(normalized, Tau(tau), m.q, N);
    log.info("{}: certified c_max = {}", label, io::format_double(*cert.c_max));
    set.push_back({label, Recursion::robust(Tau(tau), *cert.c_max)});
  }
  return set;
}

void cmd_certify(const Manifest& m, std::ostream& out, spdlog::logger& log) {
  const StateSpaceModel model = io::load_model(m.model_path);
  const NormalizedModel normalized = normalize(model);
  const Eigen::Index N = m.N ? *m.N : default_block_length(normalized);
  CertificateMode mode;
  if (m.mode == "robust") {
    mode = CertificateMode::robust;
  } else if (m.mode == "risk_sensitive") {
    mode = CertificateMode::risk_sensitive;
  } else {
    throw UsageError("unknown mode '" + m.mode + "'");
  }
  if (N < normalized.n()) log.warn("N = {} is below the state dimension {}; no certificate exists", N, normalized.n());
  log.info("certifying tau={} q={} N={}", m.tau, m.q, N);
  const ConvergenceCertificate cert = certify(normalized, Tau(m.tau), m.q, N, mode);
  emit(m, out, [&](std::ostream& os) { os << io::certificate_to_json(cert).dump(2) << '\n'; });
}

std::vector<Vector> observations_for(const StateSpaceModel& model, const Manifest& m) {
  if (m.obs_path.empty()) return simulate(model, m.steps, m.seed).observations;
  std::ifstream in(m.obs_path);
  if (!in) throw Error(ErrorCode::IoError, "observations: " + m.obs_path + " not readable");
  return io::read_observations_csv(in, model.p());
}

void cmd_run(const Manifest& m, std::ostream& out, spdlog::logger& log) {
  const StateSpaceModel model = io::load_model(m.model_path);
  const FilterConfig config = config_from(m.kind, m.tau, m.c, m.theta);
  const std::vector<Vector> ys = observations_for(model, m);
  log.info("running {} filter over {} observations", m.kind, ys.size());
  const FilterTrajectory traj = run_filter(model, config, ys);
  emit(m, out, [&](std::ostream& os) { io::write_trajectory_csv(os, traj, model.n()); });
}

void cmd_compare(const Manifest& m, std::ostream& out, spdlog::logger& log) {
  const StateSpaceModel model = io::load_model(m.model_path);
  std::vector<NamedFilter> filters;
  if (m.filters.empty()) {
    filters = default_filter_set(model, m, log);
  } else {
    for (const auto& spec : m.filters) filters.push_back(parse_filter(spec));
  }
  const FilterComparison cmp = compare_filters(model, filters, m.steps, m.seed);
  emit(m, out, [&](std::ostream& os) { io::write_comparison_csv(os, cmp, model.n()); });
}

void cmd_fixed_point(const Manifest& m, std::ostream& out, spdlog::logger& log) {
  const StateSpaceModel model = io::load_model(m.model_path);
  const NormalizedModel normalized = normalize(model);
  const Recursion recursion = config_from(m.kind, m.tau, m.c, m.theta);
  const FixedPointReport report = iterate_to_fixed_point(normalized, model.V0(), recursion, m.tol, m.max_iter);
  log.info("converged after {} iterations", report.iterations);
  nlohmann::json j;
  j["P_star"] = io::matrix_to_json(report.P_star);
  j["V_star"] = io::matrix_to_json(report.V_star);
  j["theta_star"] = report.theta_star;
  j["G_star"] = io::matrix_to_json(report.G_star);
  j["iterations"] = report.iterations;
  j["final_step_distance"] = report.final_step_distance;
  j["spectral_radius_closed_loop"] = report.spectral_radius_closed_loop;
  j["lyapunov_residual"] = report.lyapunov_residual;
  emit(m, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

void cmd_metric(const Manifest& m, std::ostream& out) {
  const Matrix P = io::load_matrix(m.matrix_files.at(0));
  const Matrix Q = io::load_matrix(m.matrix_files.at(1));
  const double d = thompson_metric(P, Q);
  emit(m, out, [&](std::ostream& os) { os << io::format_double(d) << '\n'; });
}

void cmd_simulate(const Manifest& m, std::ostream& out) {
  const StateSpaceModel model = io::load_model(m.model_path);
  const Trajectory traj = simulate(model, m.steps, m.seed);
  emit(m, out, [&](std::ostream& os) { io::write_observations_csv(os, traj.observations, model.p()); });
}

void add_model(CLI::App* cmd, Manifest& m) {
  cmd->add_option("--model", m.model_path, "Model JSON (keys A, B, C, D, x0_mean, V0)")->required();
}

void add_filter_options(CLI::App* cmd, Manifest& m) {
  cmd->add_option("--kind", m.kind, "standard | robust | risk_sensitive")
      ->check(CLI::IsMember({"standard", "robust", "risk_sensitive"}));
  cmd->add_option("--tau", m.tau, "Divergence family parameter in [0, 1]")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--c", m.c, "Tolerance (robust)");
  cmd->add_option("--theta", m.theta, "Risk parameter (risk_sensitive)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto log = make_logger(err);
  Manifest m;

  CLI::App app{"Robust and risk-sensitive Kalman filters with Thompson-metric convergence certificates"};
  app.require_subcommand(1);
  app.footer(kRngNote);

  auto* certify_cmd = app.add_subcommand("certify", "Largest certified tolerance c_max (or theta_max for tau = 1)");
  add_model(certify_cmd, m);
  certify_cmd->add_option("--tau", m.tau, "Divergence family parameter in [0, 1]")->check(CLI::Range(0.0, 1.0));
  certify_cmd->add_option("--q", m.q, "Standard Riccati steps from B B^T")->check(CLI::PositiveNumber);
  certify_cmd->add_option("--N", m.N, "Block length (default max(n, 50))")->check(CLI::PositiveNumber);
  certify_cmd->add_option("--mode", m.mode, "robust | risk_sensitive")
      ->check(CLI::IsMember({"robust", "risk_sensitive"}));
  certify_cmd->add_option("--out", m.out_path, "Write JSON here instead of stdout");

  auto* run_cmd = app.add_subcommand(
      "run", "Run one filter; CSV columns k, xhat_i, P_ij, V_ij (upper triangle), theta. "
             "The first gain uses V0 from the model file.");
  add_model(run_cmd, m);
  add_filter_options(run_cmd, m);
  run_cmd->add_option("--steps", m.steps, "Simulated steps when --obs is absent");
  run_cmd->add_option("--seed", m.seed, "Simulation seed");
  run_cmd->add_option("--obs", m.obs_path, "Observation CSV with header y1,...,yp");
  run_cmd->add_option("--out", m.out_path, "Write CSV here instead of stdout");

  auto* compare_cmd = app.add_subcommand(
      "compare", "Run several filters on one simulated record. Without --filter: KF and robust "
                 "filters at tau = 0, 0.5, 1 with their certified c_max.");
  add_model(compare_cmd, m);
  compare_cmd->add_option("--filter", m.filters, "[LABEL=]KIND[:TAU[:C_OR_THETA]], repeatable");
  compare_cmd->add_option("--steps", m.steps, "Simulated steps");
  compare_cmd->add_option("--seed", m.seed, "Simulation seed");
  compare_cmd->add_option("--q", m.q, "q for the default certified set")->check(CLI::PositiveNumber);
  compare_cmd->add_option("--N", m.N, "N for the default certified set")->check(CLI::PositiveNumber);
  compare_cmd->add_option("--out", m.out_path, "Write CSV here instead of stdout");

  auto* fixed_cmd = app.add_subcommand(
      "fixed-point", "Iterate the covariance recursion from V0 until the Thompson step is below --tol");
  add_model(fixed_cmd, m);
  add_filter_options(fixed_cmd, m);
  fixed_cmd->add_option("--tol", m.tol, "Thompson-metric stopping tolerance")->check(CLI::PositiveNumber);
  fixed_cmd->add_option("--max-iter", m.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
  fixed_cmd->add_option("--out", m.out_path, "Write JSON here instead of stdout");

  auto* metric_cmd = app.add_subcommand("metric", "Thompson metric between two SPD matrices (JSON files)");
  metric_cmd->add_option("files", m.matrix_files, "P_file Q_file")->required()->expected(2);
  metric_cmd->add_option("--out", m.out_path, "Write the value here instead of stdout");

  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate the nominal model; writes observation CSV");
  add_model(simulate_cmd, m);
  simulate_cmd->add_option("--steps", m.steps, "Number of steps");
  simulate_cmd->add_option("--seed", m.seed, "Simulation seed");
  simulate_cmd->add_option("--out", m.out_path, "Write CSV here instead of stdout");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (certify_cmd->parsed()) cmd_certify(m, out, *log);
    if (run_cmd->parsed()) cmd_run(m, out, *log);
    if (compare_cmd->parsed()) cmd_compare(m, out, *log);
    if (fixed_cmd->parsed()) cmd_fixed_point(m, out, *log);
    if (metric_cmd->parsed()) cmd_metric(m, out);
    if (simulate_cmd->parsed()) cmd_simulate(m, out);
  } catch (const UsageError& e) {
    err << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << e.what() << '\n';
    log->debug("error code {}", to_string(e.code()));
    return is_input_error(e.code()) ? kInputError : kNumericFailure;
  }
  return kOk;
}

}  // namespace robkf::cli
