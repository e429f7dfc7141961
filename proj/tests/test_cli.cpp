#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using swexp::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  for (std::string line; std::getline(ss, line);)
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  return lines;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("swexp_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

TEST_CASE("number formatting") {
  using swexp::cli::format_number;
  using swexp::cli::parse_number;
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
  CHECK(format_number(NAN) == "nan");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(0.5) == "0.5");
  CHECK(std::isinf(parse_number("inf")));
  CHECK(std::isnan(parse_number("nan")));
  CHECK(parse_number(format_number(0.1234567891)) == 0.1234567891);
}

TEST_CASE("exponent command") {
  auto r = invoke({"exponent", "--method", "gf", "--bss", "0.1", "--R", "0.5", "--T", "0"});
  CHECK(r.code == 0);
  auto lines = data_lines(r.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "method,exponent,units,R,T,value,diverged,rho,s,detail");
  CHECK(std::stod(split(lines[1])[5]) >= 0.0);

  r = invoke({"exponent", "--method", "tce-binary", "--bss", "0.1", "--R", "0.5", "--T", "-2.3"});
  CHECK(r.code == 0);
  lines = data_lines(r.out);
  REQUIRE(lines.size() == 2);
  CHECK(split(lines[1])[5] == "inf");
  CHECK(split(lines[1])[6] == "1");

  r = invoke({"exponent", "--method", "gf", "--bss", "0.1", "--R", "0.1:0.6:4", "--T", "-0.2,0,0.1"});
  CHECK(r.code == 0);
  CHECK(data_lines(r.out).size() == 1 + 4 * 3);

  r = invoke({"exponent", "--method", "gf", "--bss", "0.1", "--R", "0.5", "--T", "0", "--exponent", "e2",
              "--units", "bits"});
  CHECK(r.code == 0);
}

TEST_CASE("invalid input exits with 2") {
  const fs::path dir = scratch("invalid");
  std::ofstream(dir / "bad.json") << R"({"alphabet_x": ["0","1"], "alphabet_y": ["0","1"], "pmf": [[0.5,0.5],[0.1,0.0]]})";
  auto r = invoke({"exponent", "--method", "gf", "--source", (dir / "bad.json").string(), "--R", "0.5", "--T", "0"});
  CHECK(r.code == 2);
  CHECK(r.err.find("pmf") != std::string::npos);
  CHECK(invoke({"exponent", "--method", "nope", "--bss", "0.1", "--R", "0.5", "--T", "0"}).code == 2);
  CHECK(invoke({"exponent", "--method", "gf", "--R", "0.5", "--T", "0"}).code == 2);
  CHECK(invoke({"exponent", "--method", "gf", "--bss", "0.7", "--R", "0.5", "--T", "0"}).code == 2);
  CHECK(invoke({"exponent", "--method", "gf", "--bss", "0.1", "--R", "abc", "--T", "0"}).code == 2);
  CHECK(invoke({}).code == 2);
}

TEST_CASE("resource cap exits with 3") {
  const auto r = invoke({"simulate", "--n", "40", "--alphabet", "4", "--bss", "0.1", "--R", "0.5", "--trials", "10"});
  CHECK(r.code == 3);
  CHECK(r.out.empty());
}

TEST_CASE("simulate golden file and manifest") {
  const fs::path dir = scratch("golden");
  const fs::path csv = dir / "sim.csv";
  const auto r = invoke({"simulate", "--bss", "0.1", "--n", "8", "--R", "0.5", "--T", "0", "--trials", "100000",
                         "--seed", "7", "--out", csv.string()});
  REQUIRE(r.code == 0);
  CHECK(slurp(csv) == slurp(fs::path(SWEXP_TEST_DATA_DIR) / "simulate_bss0.1_n8.csv"));

  const auto manifest = nlohmann::json::parse(slurp(fs::path(csv.string() + ".manifest.json")));
  CHECK(manifest["command"] == "simulate");
  CHECK(manifest["master_seed"] == 7);
  CHECK(manifest["outputs"][0] == csv.string());
  CHECK(manifest["library_version"].is_string());

  // Same flags, same bytes; more workers, same bytes.
  const fs::path csv2 = dir / "sim2.csv";
  REQUIRE(invoke({"simulate", "--bss", "0.1", "--n", "8", "--R", "0.5", "--T", "0", "--trials", "100000", "--seed",
                  "7", "--workers", "3", "--out", csv2.string()})
              .code == 0);
  CHECK(slurp(csv2) == slurp(csv));
}

TEST_CASE("exponent golden file") {
  const auto r = invoke({"exponent", "--method", "gf", "--bss", "0.1", "--R", "0.3,0.5", "--T", "-0.2,0"});
  REQUIRE(r.code == 0);
  CHECK(r.out == slurp(fs::path(SWEXP_TEST_DATA_DIR) / "exponent_gf_bss0.1.csv"));
}

TEST_CASE("source spec digest recorded in the manifest") {
  const fs::path dir = scratch("digest");
  std::ofstream(dir / "src.json") << R"({"alphabet_x": ["a","b"], "alphabet_y": ["u","v"], "pmf": [[0.45,0.05],[0.05,0.45]]})";
  const auto r = invoke({"exponent", "--method", "tce-general", "--source", (dir / "src.json").string(), "--R", "0.5",
                         "--T", "0", "--out", (dir / "e.csv").string()});
  REQUIRE(r.code == 0);
  const auto m = nlohmann::json::parse(slurp(dir / "e.csv.manifest.json"));
  CHECK(m["inputs"][(dir / "src.json").string()].get<std::string>().rfind("fnv1a64:", 0) == 0);
}

TEST_CASE("default output directory from the environment") {
  const fs::path dir = scratch("env");
  setenv("SWEXP_OUT_DIR", dir.c_str(), 1);
  const auto r = invoke({"exponent", "--method", "gf", "--bss", "0.2", "--R", "0.6", "--T", "0"});
  unsetenv("SWEXP_OUT_DIR");
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(fs::exists(dir / "exponent.csv"));
  CHECK(fs::exists(dir / "exponent.csv.manifest.json"));
}

TEST_CASE("phase diagram") {
  const fs::path dir = scratch("phase");
  auto r = invoke({"phase-diagram", "--p", "0.1", "--out-dir", dir.string()});
  REQUIRE(r.code == 0);
  for (const char* f : {"phase_grid.csv", "phase_boundaries.csv", "phase_continuity.csv", "phase_diagram.gp",
                        "phase_diagram.manifest.json"})
    CHECK(fs::exists(dir / f));
  std::set<std::string> regions;
  for (const auto& line : data_lines(slurp(dir / "phase_grid.csv"))) regions.insert(split(line)[2]);
  regions.erase("region");
  CHECK(regions == std::set<std::string>{"A", "B", "C", "D", "E", "F", "G"});
  const auto cont = data_lines(slurp(dir / "phase_continuity.csv"));
  CHECK(cont.size() > 10);
  for (std::size_t i = 1; i < cont.size(); ++i) CHECK(std::stod(split(cont[i])[5]) <= 1e-9);
  const std::string gp = slurp(dir / "phase_diagram.gp");
  CHECK(gp.find("dt 1") != std::string::npos);
  CHECK(gp.find("dt 2") != std::string::npos);

  const fs::path half = scratch("phase_half");
  r = invoke({"phase-diagram", "--p", "0.5", "--out-dir", half.string()});
  REQUIRE(r.code == 0);
  for (const auto& line : data_lines(slurp(half / "phase_boundaries.csv"))) {
    const auto c = split(line);
    if (c[0] == "s") continue;
    CHECK(std::stod(c[1]) == doctest::Approx(std::log(2.0)));
    CHECK(std::stod(c[2]) == doctest::Approx(std::log(2.0)));
  }
}

TEST_CASE("compare") {
  const fs::path dir = scratch("compare");
  REQUIRE(invoke({"simulate", "--bss", "0.1", "--n", "4,6,8,10", "--R", "0.5", "--T", "0", "--trials", "200000",
                  "--seed", "3", "--out", (dir / "sim.csv").string()})
              .code == 0);
  REQUIRE(invoke({"exponent", "--method", "gf", "--bss", "0.1", "--R", "0.5", "--T", "0", "--out",
                  (dir / "exp.csv").string()})
              .code == 0);
  auto r = invoke({"compare", "--sim", (dir / "sim.csv").string(), "--exponent", (dir / "exp.csv").string()});
  CHECK(r.code == 0);
  const auto lines = data_lines(r.out);
  REQUIRE(lines.size() == 2);
  CHECK(split(lines[1]).back() == "pass");

  std::ofstream(dir / "broken.csv") << "n,R_nominal,T,trials,e2_count\n4,0.5,0,10,1\n";
  r = invoke({"compare", "--sim", (dir / "broken.csv").string(), "--exponent", (dir / "exp.csv").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("'e1_count'") != std::string::npos);
}
