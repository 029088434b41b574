#pragma once

#include "robkf/contraction.hpp"
#include "robkf/filter.hpp"
#include "robkf/model.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace robkf::io {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

/// Array of arrays (row-major). A flat array is read as a single row.
/// Throws ParseError on ragged rows or non-finite entries.
Matrix matrix_from_json(const nlohmann::json& j, const std::string& what);
Vector vector_from_json(const nlohmann::json& j, const std::string& what);
nlohmann::json matrix_to_json(const Matrix& m);

/// Keys "A", "B", "C", "D" are required. "x0_mean" defaults to zeros and
/// "V0" to the identity.
ModelMatrices model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const StateSpaceModel& model);

/// Throws IoError ("model: <path> not readable") or ParseError, then validates.
StateSpaceModel load_model(const std::filesystem::path& path);

/// Reads a JSON matrix file. Throws IoError or ParseError.
Matrix load_matrix(const std::filesystem::path& path);

nlohmann::json certificate_to_json(const ConvergenceCertificate& cert);

/// CSV with header "y1,...,yp" and one row per step.
std::vector<Vector> read_observations_csv(std::istream& in, Eigen::Index p);
void write_observations_csv(std::ostream& out, const std::vector<Vector>& observations, Eigen::Index p);

/// Column names for one filter trajectory: xhat_i, P_ij and V_ij over the upper
/// triangle, theta. `prefix` is prepended to each name.
std::vector<std::string> trajectory_columns(Eigen::Index n, const std::string& prefix = "");

/// Values matching trajectory_columns() for row k (1-based step index).
std::vector<double> trajectory_row(const FilterTrajectory& traj, std::size_t k);

/// Header "k,<trajectory columns>" then one row per step.
void write_trajectory_csv(std::ostream& out, const FilterTrajectory& traj, Eigen::Index n);

/// Aligned table of several filters. A single filter is written without prefixes,
/// matching write_trajectory_csv().
void write_comparison_csv(std::ostream& out, const FilterComparison& cmp, Eigen::Index n);

}  // namespace robkf::io
