#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir = fs::temp_directory_path() / ("pacurves_cli_" + std::to_string(::getpid()));
  Scratch() {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
};

const fs::path& scratch() {
  static const Scratch s;
  return s.dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(PA_CURVES_EXE) + " " + args + " > " + (scratch() / "last.log").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string sub(const std::string& name) { return (scratch() / name).string(); }

void write_csv(const std::string& path, const std::string& header, double a, double b, double h,
               const std::function<std::vector<double>(double)>& row) {
  std::ofstream out(path);
  out.precision(17);
  out << header << '\n';
  const int n = static_cast<int>(std::lround((b - a) / h));
  for (int i = 0; i <= n; ++i) {
    const double s = a + i * h;
    out << s;
    for (double x : row(s)) out << ',' << x;
    out << '\n';
  }
}

bool validates(const std::string& files) {
  const std::string cmd = std::string(PYTHON3_EXE) + " " + PACURVES_SOURCE_DIR + "/tests/validate_reports.py " +
                          PACURVES_SOURCE_DIR + "/schemas/report.schema.json " + files;
  return std::system(cmd.c_str()) == 0;
}

}  // namespace

TEST_CASE("golden all") {
  CHECK(run("golden all --out " + sub("golden")) == 0);
  for (int i = 1; i <= 6; ++i) {
    CHECK(fs::exists(sub("golden/G" + std::to_string(i) + ".json")));
    CHECK(fs::exists(sub("golden/G" + std::to_string(i) + "_profiles.csv")));
  }
  CHECK(validates(sub("golden") + "/G*.json"));
  CHECK(run("golden G9 --out " + sub("golden9")) == 1);
}

TEST_CASE("usage errors exit 1") {
  CHECK(run("") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("analyze --model euclidean:3") == 1);
  CHECK(run("synthesize " + std::string(PACURVES_SOURCE_DIR) + "/data/synthesis/sphere_concircular.json --span 1") == 1);
  CHECK(run("--help") == 0);
}

TEST_CASE("analyze") {
  SUBCASE("straight line has no Frenet frame") {
    write_csv(sub("line.csv"), "s,x,y,z", 0, 1, 1e-3, [](double s) { return std::vector<double>{s, s, 0}; });
    CHECK(run("analyze --model euclidean:3 --curve " + sub("line.csv") + " --out " + sub("line")) == 2);
  }
  SUBCASE("helix given at speed sqrt 2 is reparametrized") {
    write_csv(sub("helix.csv"), "t,x,y,z", 0, 2, 1e-3,
              [](double t) { return std::vector<double>{std::cos(t), std::sin(t), t}; });
    CHECK(run("analyze --model euclidean:3 --curve " + sub("helix.csv") + " --out " + sub("helix")) == 0);
    const std::string json = testing::slurp(sub("helix/analysis.json"));
    CHECK(json.find("\"reparametrized\": \"true\"") != std::string::npos);
    CHECK(validates(sub("helix/analysis.json")));
    std::ifstream in(sub("helix/profiles.csv"));
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header.rfind("s,kappa,tau", 0) == 0);
    const double kappa = std::stod(row.substr(row.find(',') + 1));
    CHECK(kappa == doctest::Approx(0.5).epsilon(1e-6));
  }
  SUBCASE("field on a different grid needs --interpolate") {
    write_csv(sub("circle.csv"), "s,x,y", 0, 1, 1e-3,
              [](double s) { return std::vector<double>{std::cos(s), std::sin(s)}; });
    write_csv(sub("circle_field.csv"), "s,vx,vy", 0, 1, 2e-3,
              [](double s) { return std::vector<double>{std::cos(s), std::sin(s)}; });
    const std::string base = "analyze --model euclidean:2 --curve " + sub("circle.csv") + " --field " +
                             sub("circle_field.csv") + " --out " + sub("circle");
    CHECK(run(base) == 1);
    CHECK(run(base + " --interpolate") == 0);
  }
}

TEST_CASE("transport writes the field") {
  write_csv(sub("unit_circle.csv"), "s,x,y", -2, 2, 1e-3,
            [](double s) { return std::vector<double>{std::cos(s), std::sin(s)}; });
  write_csv(sub("law.csv"), "s,f,omega", -2, 2, 1e-3, [](double s) { return std::vector<double>{std::cos(s), 0}; });
  CHECK(run("transport --model euclidean:2 --curve " + sub("unit_circle.csv") + " --law " + sub("law.csv") +
            " --v0 0.5,0 --at 0 --class concircular --out " + sub("transport")) == 0);
  std::ifstream in(sub("transport/field.csv"));
  std::string line, last;
  std::getline(in, line);
  while (std::getline(in, line)) last = line;
  std::vector<double> cells;
  std::stringstream row(last);
  std::string cell;
  while (std::getline(row, cell, ',')) cells.push_back(std::stod(cell));
  REQUIRE(cells.size() == 3);
  CHECK(cells[1] == doctest::Approx(std::pow(std::cos(2.0), 2) / 2).epsilon(1e-8));
  CHECK(cells[2] == doctest::Approx(1 + std::sin(4.0) / 4).epsilon(1e-8));
}

TEST_CASE("synthesize") {
  CHECK(run("synthesize " + std::string(PACURVES_SOURCE_DIR) + "/data/synthesis/sphere_concircular.json --out " +
            sub("sphere")) == 0);
  for (const char* f : {"report.json", "curve.csv", "field.csv", "profiles.csv"}) CHECK(fs::exists(sub("sphere") + "/" + f));
  CHECK(validates(sub("sphere/report.json")));
  const std::string json = testing::slurp(sub("sphere/report.json"));
  CHECK(json.find("\"geodesic_sphere\"") != std::string::npos);
}

TEST_CASE("selfcheck") {
  CHECK(run("selfcheck --count 8 --out " + sub("self")) == 0);
  CHECK(validates(sub("self/selfcheck.json")));
  CHECK(run("selfcheck --count 0") == 1);
}

TEST_CASE("list-models") {
  CHECK(run("list-models") == 0);
  CHECK(testing::slurp(sub("last.log")).find("halfspace") != std::string::npos);
}
