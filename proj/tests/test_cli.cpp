#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "robkf/cli/commands.hpp"
#include "robkf/cli/io.hpp"
#include "robkf/error.hpp"
#include "robkf/thompson.hpp"
#include "test_support.hpp"

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace robkf;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "robkf");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class Workspace {
 public:
  Workspace() {
    static int counter = 0;
    dir_ = fs::temp_directory_path() / ("robkf_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir_);
  }
  ~Workspace() { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) const {
    const fs::path path = dir_ / name;
    std::ofstream(path) << text;
    return path.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string model() const {
    return write("model.json", io::model_to_json(testing::example_model()).dump());
  }

 private:
  fs::path dir_;
};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::istringstream in(line);
  for (std::string cell; std::getline(in, cell, ',');) cells.push_back(cell);
  return cells;
}

}  // namespace

TEST_CASE("certify prints the example certificate") {
  Workspace ws;
  const Result r = invoke({"certify", "--model", ws.model(), "--tau", "0", "--q", "40", "--N", "50"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("c_max").get<double>() == doctest::Approx(0.122).epsilon(0.02));
  CHECK(j.at("mode") == "robust");
  CHECK(j.at("N") == 50);

  const Result rs = invoke({"certify", "--model", ws.model(), "--tau", "1", "--mode", "risk_sensitive"});
  REQUIRE(rs.code == 0);
  const auto k = nlohmann::json::parse(rs.out);
  const double sigma = k.at("sigma_n"), phi = k.at("phi_N");
  CHECK(k.at("theta_max").get<double>() == doctest::Approx(-std::log(1.0 - sigma * phi) / sigma).epsilon(1e-12));
  CHECK_FALSE(k.contains("c_max"));
}

TEST_CASE("exit codes") {
  Workspace ws;
  const Result missing = invoke({"certify", "--model", ws.path("nope.json")});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("model: " + ws.path("nope.json") + " not readable") != std::string::npos);

  const Result bad_json = invoke({"certify", "--model", ws.write("bad.json", "{\"A\": [[1]]")});
  CHECK(bad_json.code == 2);

  auto raw = testing::example_matrices();
  raw.D.setZero();
  nlohmann::json singular = io::model_to_json(testing::example_model());
  singular["D"] = io::matrix_to_json(raw.D);
  CHECK(invoke({"certify", "--model", ws.write("singular.json", singular.dump())}).code == 2);

  nlohmann::json unobservable = io::model_to_json(testing::example_model());
  unobservable["A"] = io::matrix_to_json(Matrix::Identity(2, 2));
  unobservable["C"] = nlohmann::json::array({1.0, 0.0});
  CHECK(invoke({"certify", "--model", ws.write("unobs.json", unobservable.dump())}).code == 2);

  CHECK(invoke({"certify"}).code == 1);
  CHECK(invoke({"nonsense"}).code == 1);
  CHECK(invoke({"run", "--model", ws.model(), "--kind", "robust"}).code == 1);
  CHECK(invoke({"certify", "--model", ws.model(), "--tau", "2"}).code == 1);
  CHECK(invoke({"--help"}).code == 0);

  // Numeric failures: risk-sensitive certificate for tau < 1, N below n, a
  // risk-sensitive run that leaves its domain.
  CHECK(invoke({"certify", "--model", ws.model(), "--tau", "0.5", "--mode", "risk_sensitive"}).code == 3);
  CHECK(invoke({"certify", "--model", ws.model(), "--N", "1"}).code == 3);
  CHECK(invoke({"run", "--model", ws.model(), "--kind", "risk_sensitive", "--tau", "0.5", "--theta", "0.05"}).code == 3);
  CHECK(invoke({"fixed-point", "--model", ws.model(), "--kind", "robust", "--c", "0.1", "--max-iter", "2"}).code == 3);
}

TEST_CASE("run writes the trajectory table") {
  Workspace ws;
  const Result r = invoke({"run", "--model", ws.model(), "--kind", "robust", "--tau", "0.5", "--c", "0.101", "--steps", "100"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 101);
  CHECK(rows[0] == "k,xhat_1,xhat_2,P_11,P_12,P_22,V_11,V_12,V_22,theta");
  const double p20 = std::stod(split(rows[20])[3]);
  const double p100 = std::stod(split(rows[100])[3]);
  CHECK(std::abs(p20 - p100) < 0.01 * p100);

  const Result empty = invoke({"run", "--model", ws.model(), "--steps", "0"});
  REQUIRE(empty.code == 0);
  CHECK(lines(empty.out).size() == 1);

  const Result standard = invoke({"run", "--model", ws.model(), "--kind", "standard", "--steps", "10"});
  for (std::size_t i = 1; i < lines(standard.out).size(); ++i) CHECK(split(lines(standard.out)[i]).back() == "0");
}

TEST_CASE("run reads observations from a file") {
  Workspace ws;
  const Result sim = invoke({"simulate", "--model", ws.model(), "--steps", "30", "--seed", "4", "--out", ws.path("obs.csv")});
  REQUIRE(sim.code == 0);
  const Result from_file = invoke({"run", "--model", ws.model(), "--kind", "robust", "--c", "0.05", "--obs", ws.path("obs.csv")});
  const Result simulated = invoke({"run", "--model", ws.model(), "--kind", "robust", "--c", "0.05", "--steps", "30", "--seed", "4"});
  REQUIRE(from_file.code == 0);
  CHECK(from_file.out == simulated.out);

  CHECK(invoke({"run", "--model", ws.model(), "--obs", ws.write("bad.csv", "y1\n1.0\nx\n")}).code == 2);
  CHECK(invoke({"run", "--model", ws.model(), "--obs", ws.write("hdr.csv", "y1,y2\n1,2\n")}).code == 2);
}

TEST_CASE("compare") {
  Workspace ws;
  const Result single = invoke({"compare", "--model", ws.model(), "--filter", "robust:0.5:0.1", "--steps", "20", "--seed", "3"});
  const Result run = invoke({"run", "--model", ws.model(), "--kind", "robust", "--tau", "0.5", "--c", "0.1", "--steps", "20", "--seed", "3"});
  REQUIRE(single.code == 0);
  CHECK(single.out == run.out);

  const Result four = invoke({"compare", "--model", ws.model(), "--steps", "30", "--out", ws.path("a.csv")});
  REQUIRE(four.code == 0);
  invoke({"compare", "--model", ws.model(), "--steps", "30", "--out", ws.path("b.csv")});
  std::ifstream a(ws.path("a.csv")), b(ws.path("b.csv"));
  const std::string ta((std::istreambuf_iterator<char>(a)), {}), tb((std::istreambuf_iterator<char>(b)), {});
  CHECK(ta == tb);
  const auto header = split(lines(ta)[0]);
  for (const char* label : {"KF", "RKF0", "RKF05", "RKF1"}) {
    for (const char* col : {"_P_11", "_P_22", "_V_11", "_V_22", "_theta"}) {
      CHECK(std::find(header.begin(), header.end(), std::string(label) + col) != header.end());
    }
  }

  const Result labelled = invoke({"compare", "--model", ws.model(), "--filter", "KF=standard", "--filter", "hot=risk_sensitive:1:0.001", "--steps", "5"});
  REQUIRE(labelled.code == 0);
  CHECK(lines(labelled.out)[0].find("hot_theta") != std::string::npos);
  CHECK(invoke({"compare", "--model", ws.model(), "--filter", "robust:0.5"}).code == 1);
  CHECK(invoke({"compare", "--model", ws.model(), "--filter", "wobbly"}).code == 1);
}

TEST_CASE("metric") {
  Workspace ws;
  const std::string I = ws.write("i.json", "[[1,0],[0,1]]");
  const std::string I2 = ws.write("i2.json", "[[2,0],[0,2]]");
  CHECK(invoke({"metric", I, I}).out == "0\n");
  CHECK(std::stod(invoke({"metric", I, I2}).out) == doctest::Approx(0.693147).epsilon(1e-6));

  std::mt19937_64 rng(61);
  const Matrix P = testing::random_spd(3, rng);
  const Matrix Q = testing::random_spd(3, rng);
  const Result r = invoke({"metric", ws.write("p.json", io::matrix_to_json(P).dump()), ws.write("q.json", io::matrix_to_json(Q).dump())});
  REQUIRE(r.code == 0);
  CHECK(std::stod(r.out) == thompson_metric(P, Q));
  CHECK(invoke({"metric", I, ws.write("neg.json", "[[-1,0],[0,1]]")}).code == 3);
  CHECK(invoke({"metric", I}).code == 1);
}

TEST_CASE("fixed-point report") {
  Workspace ws;
  const Result r = invoke({"fixed-point", "--model", ws.model(), "--kind", "robust", "--tau", "0", "--c", "0.122"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("iterations").get<int>() <= 60);
  CHECK(j.at("spectral_radius_closed_loop").get<double>() < 1.0);
  CHECK(j.at("final_step_distance").get<double>() <= 1e-9);
}

TEST_CASE("numbers round-trip through the text formats") {
  std::mt19937_64 rng(62);
  const Matrix M = testing::random_matrix(3, 4, rng) * 1e3;
  const Matrix back = io::matrix_from_json(nlohmann::json::parse(io::matrix_to_json(M).dump()), "M");
  CHECK(back == M);

  std::vector<Vector> ys;
  for (int k = 0; k < 10; ++k) ys.push_back(testing::random_matrix(2, 1, rng) / 3.0);
  std::stringstream csv;
  io::write_observations_csv(csv, ys, 2);
  const auto read = io::read_observations_csv(csv, 2);
  REQUIRE(read.size() == ys.size());
  for (std::size_t k = 0; k < ys.size(); ++k) CHECK(read[k] == ys[k]);

  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 123456789.123456789}) {
    CHECK(std::stod(io::format_double(v)) == v);
  }
}

TEST_CASE("model JSON defaults and shape errors") {
  const auto raw = io::model_from_json(nlohmann::json::parse(R"({"A": [[0.5]], "B": [1, 0], "C": [[1]], "D": [0, 1]})"));
  CHECK(raw.V0 == Matrix::Identity(1, 1));
  CHECK(raw.x0_mean == Vector::Zero(1));
  CHECK(raw.B.rows() == 1);
  CHECK(raw.B.cols() == 2);
  CHECK_THROWS_AS(io::model_from_json(nlohmann::json::parse(R"({"A": [[1, 2], [3]], "B": [1], "C": [1], "D": [1]})")), Error);
  CHECK_THROWS_AS(io::model_from_json(nlohmann::json::parse(R"({"A": [[1]], "B": [1], "C": [1]})")), Error);
}
