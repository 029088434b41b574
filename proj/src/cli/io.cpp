#include "robkf/cli/io.hpp"

#include "robkf/error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace robkf::io {

using nlohmann::json;

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), end);
}

namespace {

double finite_number(const json& j, const std::string& what) {
  if (!j.is_number()) throw Error(ErrorCode::ParseError, what + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw Error(ErrorCode::ParseError, what + ": non-finite number");
  return v;
}

double parse_cell(const std::string& cell, std::size_t line) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw Error(ErrorCode::ParseError, "observations line " + std::to_string(line) + ": bad number '" + cell + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

void write_row(std::ostream& out, std::size_t k, const std::vector<double>& values) {
  out << k;
  for (double v : values) out << ',' << format_double(v);
  out << '\n';
}

void write_header(std::ostream& out, const std::vector<std::string>& names) {
  out << 'k';
  for (const auto& name : names) out << ',' << name;
  out << '\n';
}

}  // namespace

Matrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::ParseError, what + ": expected a non-empty array");
  if (!j.front().is_array()) {
    Matrix row(1, static_cast<Eigen::Index>(j.size()));
    for (std::size_t c = 0; c < j.size(); ++c) row(0, static_cast<Eigen::Index>(c)) = finite_number(j[c], what);
    return row;
  }
  const std::size_t cols = j.front().size();
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw Error(ErrorCode::ParseError, what + ": rows must be arrays of equal length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = finite_number(j[r][c], what);
    }
  }
  return m;
}

Vector vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, what + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = finite_number(j[i], what);
  return v;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

ModelMatrices model_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "model: expected a JSON object");
  for (const char* key : {"A", "B", "C", "D"}) {
    if (!j.contains(key)) throw Error(ErrorCode::ParseError, std::string("model: missing key \"") + key + "\"");
  }
  ModelMatrices raw;
  raw.A = matrix_from_json(j.at("A"), "A");
  raw.B = matrix_from_json(j.at("B"), "B");
  raw.C = matrix_from_json(j.at("C"), "C");
  raw.D = matrix_from_json(j.at("D"), "D");
  const Eigen::Index n = raw.A.rows();
  raw.x0_mean = j.contains("x0_mean") ? vector_from_json(j.at("x0_mean"), "x0_mean") : Vector(Vector::Zero(n));
  raw.V0 = j.contains("V0") ? matrix_from_json(j.at("V0"), "V0") : Matrix(Matrix::Identity(n, n));
  return raw;
}

json model_to_json(const StateSpaceModel& model) {
  json j;
  j["A"] = matrix_to_json(model.A());
  j["B"] = matrix_to_json(model.B());
  j["C"] = matrix_to_json(model.C());
  j["D"] = matrix_to_json(model.D());
  j["x0_mean"] = std::vector<double>(model.x0_mean().data(), model.x0_mean().data() + model.x0_mean().size());
  j["V0"] = matrix_to_json(model.V0());
  return j;
}

namespace {

json read_json_file(const std::filesystem::path& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, what + ": " + path.string() + " not readable");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, what + ": " + path.string() + ": " + e.what());
  }
}

}  // namespace

StateSpaceModel load_model(const std::filesystem::path& path) {
  return validate(model_from_json(read_json_file(path, "model")));
}

Matrix load_matrix(const std::filesystem::path& path) {
  return matrix_from_json(read_json_file(path, "matrix"), path.string());
}

json certificate_to_json(const ConvergenceCertificate& cert) {
  json j;
  j["mode"] = cert.mode == CertificateMode::robust ? "robust" : "risk_sensitive";
  j["tau"] = cert.tau.value();
  j["q"] = cert.q;
  j["N"] = cert.N;
  j["P_bar_q"] = matrix_to_json(cert.P_bar_q);
  j["sigma_n"] = cert.sigma_n;
  j["tilde_phi_N"] = std::isfinite(cert.tilde_phi_N) ? json(cert.tilde_phi_N) : json(nullptr);
  j["phi_N"] = cert.phi_N;
  j["theta_bar"] = cert.theta_bar;
  if (cert.c_max) j["c_max"] = *cert.c_max;
  if (cert.theta_max) j["theta_max"] = *cert.theta_max;
  return j;
}

std::vector<Vector> read_observations_csv(std::istream& in, Eigen::Index p) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "observations: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  if (static_cast<Eigen::Index>(header.size()) != p) {
    throw Error(ErrorCode::ParseError, "observations: header has " + std::to_string(header.size()) +
                                           " columns, expected " + std::to_string(p));
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] != "y" + std::to_string(i + 1)) {
      throw Error(ErrorCode::ParseError, "observations: header must be y1,...,y" + std::to_string(p));
    }
  }
  std::vector<Vector> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (static_cast<Eigen::Index>(cells.size()) != p) {
      throw Error(ErrorCode::ParseError, "observations line " + std::to_string(line_no) + ": expected " +
                                             std::to_string(p) + " columns");
    }
    Vector y(p);
    for (Eigen::Index i = 0; i < p; ++i) y(i) = parse_cell(cells[static_cast<std::size_t>(i)], line_no);
    rows.push_back(std::move(y));
  }
  return rows;
}

void write_observations_csv(std::ostream& out, const std::vector<Vector>& observations, Eigen::Index p) {
  for (Eigen::Index i = 0; i < p; ++i) out << (i ? "," : "") << 'y' << (i + 1);
  out << '\n';
  for (const Vector& y : observations) {
    for (Eigen::Index i = 0; i < y.size(); ++i) out << (i ? "," : "") << format_double(y(i));
    out << '\n';
  }
}

std::vector<std::string> trajectory_columns(Eigen::Index n, const std::string& prefix) {
  std::vector<std::string> names;
  for (Eigen::Index i = 1; i <= n; ++i) names.push_back(prefix + "xhat_" + std::to_string(i));
  for (const char* sym : {"P", "V"}) {
    for (Eigen::Index i = 1; i <= n; ++i) {
      for (Eigen::Index j = i; j <= n; ++j) {
        names.push_back(prefix + sym + "_" + std::to_string(i) + std::to_string(j));
      }
    }
  }
  names.push_back(prefix + "theta");
  return names;
}

std::vector<double> trajectory_row(const FilterTrajectory& traj, std::size_t k) {
  const std::size_t idx = k - 1;
  const Vector& x = traj.estimates[idx];
  std::vector<double> values(x.data(), x.data() + x.size());
  for (const Matrix* M : {&traj.P_seq[idx], &traj.V_seq[idx]}) {
    for (Eigen::Index i = 0; i < M->rows(); ++i) {
      for (Eigen::Index j = i; j < M->cols(); ++j) values.push_back((*M)(i, j));
    }
  }
  values.push_back(traj.theta_seq[idx]);
  return values;
}

void write_trajectory_csv(std::ostream& out, const FilterTrajectory& traj, Eigen::Index n) {
  write_header(out, trajectory_columns(n));
  for (std::size_t k = 1; k <= traj.size(); ++k) write_row(out, k, trajectory_row(traj, k));
}

void write_comparison_csv(std::ostream& out, const FilterComparison& cmp, Eigen::Index n) {
  const bool prefixed = cmp.runs.size() > 1;
  std::vector<std::string> names;
  for (const auto& label : cmp.labels) {
    auto cols = trajectory_columns(n, prefixed ? label + "_" : "");
    names.insert(names.end(), cols.begin(), cols.end());
  }
  write_header(out, names);
  const std::size_t steps = cmp.runs.empty() ? 0 : cmp.runs.front().size();
  for (std::size_t k = 1; k <= steps; ++k) {
    std::vector<double> values;
    for (const auto& run : cmp.runs) {
      auto row = trajectory_row(run, k);
      values.insert(values.end(), row.begin(), row.end());
    }
    write_row(out, k, values);
  }
}

}  // namespace robkf::io
