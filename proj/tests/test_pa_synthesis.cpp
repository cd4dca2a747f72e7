#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include "pacurves/pa_synthesis.hpp"

#include <filesystem>
#include <random>

using namespace pacurves;
using testing::max_dev;
using testing::sech;
using testing::vec;

namespace {

ScalarSeries sampled(const std::string& text, const Grid& g) { return sample(Expression::parse(text), g); }

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Usage;
}

}  // namespace

TEST_CASE("sphere family from a prescribed angle") {
  const Grid g = Grid::uniform(-0.9, 0.9, 1e-3);
  const SynthesisResult r = synthesize_pa_3d(ManifoldModel::euclidean(3), ScalarSeries::constant(g, 1),
                                             sampled("pi - asin(s)", g), ScalarSeries::constant(g, 0), 1);
  CHECK(r.report.pass());
  const auto ref = [](double s) { return 1 / std::sqrt(1 - s * s); };
  const FrenetData fr = frenet_apparatus(r.synthesized.curve);
  CHECK(max_dev(fr.curvatures.curvature(), ref) < 1e-5);
  CHECK(max_dev(fr.curvatures.torsion(), ref) < 1e-5);
  // V = position of a unit sphere, up to the sphere's centre.
  const Vec centre = r.synthesized.curve.points[0] - r.field.vectors[0];
  for (std::size_t i = 0; i < g.size(); i += 100) {
    CHECK((r.synthesized.curve.points[i] - r.field.vectors[i] - centre).norm() < 1e-6);
  }
}

TEST_CASE("infeasible prescriptions") {
  const Grid g = Grid::uniform(0, 1, 1e-3);
  const ScalarSeries f = ScalarSeries::constant(g, 1);
  const ScalarSeries zero = ScalarSeries::constant(g, 0);
  const auto e3 = ManifoldModel::euclidean(3);
  // Constant angle with lambda_0 = 0 is planar.
  CHECK(code_of([&] { synthesize_pa_3d(e3, f, ScalarSeries::constant(g, 2.0), zero, 1); }) == ErrorCode::Infeasible);
  // Negative curvature.
  CHECK(code_of([&] { synthesize_pa_3d(e3, f, sampled("1 + 0.1*s", g), zero, 1); }) == ErrorCode::Infeasible);
  // lambda_0^2 + cos^2 theta > 1.
  CHECK(code_of([&] { synthesize_pa_3d(e3, f, sampled("2.5 + 0.1*s", g), ScalarSeries::constant(g, 0.9), 1); }) ==
        ErrorCode::Infeasible);
  CHECK(code_of([&] {
          synthesize_pa_3d(ManifoldModel::euclidean(2), f, ScalarSeries::constant(g, 2.0), zero, 1);
        }) == ErrorCode::Unsupported);
}

TEST_CASE("random prescriptions round-trip") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  const std::vector<std::string> models = {"euclidean:3", "sphere:3:2", "hyperboloid:3:1.5", "warped:3:cosh(t)"};
  const Grid g = Grid::uniform(-1, 1, 1e-3);
  for (int k = 0; k < 8; ++k) {
    const double f0 = 0.5 + 0.3 * u(rng), f1 = 0.2 * u(rng);
    const double t0 = 2.1 + 0.2 * u(rng), t1 = 0.2 * u(rng);
    const double l0 = 0.3 * u(rng);
    const ScalarSeries f = ScalarSeries::from_function(g, [=](double s) { return f0 + f1 * std::sin(s); });
    const auto f_exact = sampled(std::to_string(f0) + " + " + std::to_string(f1) + "*sin(s)", g);
    const auto theta = sampled(std::to_string(t0) + " + " + std::to_string(t1) + "*cos(2*s)", g);
    const auto lambda0 = sampled(std::to_string(l0) + "*tanh(s)", g);
    const ManifoldModel model = ManifoldModel::parse(models[k % models.size()]);
    CAPTURE(model.spec());
    const SynthesisResult r = synthesize_pa_3d(model, f_exact, theta, lambda0, k % 2 ? 1 : -1);
    CHECK(r.report.pass());
    const Analysis a = analyze(r.synthesized.curve, r.field);
    REQUIRE(a.decomposition.has_value());
    CHECK(max_abs(difference(a.decomposition->lambdas[0].values, lambda0.values)) < 1e-4);
    CHECK(max_abs(difference(a.law->law.f.values, f.values)) < 1e-4);
  }
}

TEST_CASE("prescribed middle equation") {
  const Grid g = Grid::uniform(-1, 1, 1e-3);
  const ScalarSeries f = sampled("0.5", g);
  const SynthesisResult r =
      synthesize_pa_3d(ManifoldModel::sphere(3, 2), f, sampled("2 + 0.2*sin(s)", g), sampled("0.3*tanh(s)", g), 1);
  const ResidualReport res = pa_system_residuals(r.synthesized.frenet.curvatures, f, r.prescribed);
  CHECK(res.at("eq2").max_abs <= 1e-8);
}

TEST_CASE("orthogonal synthesis") {
  const Grid g = Grid::uniform(-2, 2, 1e-3);
  const ScalarSeries f = ScalarSeries::constant(g, 1);
  const ScalarSeries kappa = sampled("sech(s)", g);
  const auto e3 = ManifoldModel::euclidean(3);
  SynthesisStart start;
  start.anchor_s = 0.0;
  const SynthesisResult up = synthesize_orthogonal(e3, f, kappa, 0.0, 1, start);
  CHECK(up.report.pass());
  const FrenetData fr = frenet_apparatus(up.synthesized.curve);
  CHECK(max_dev(fr.curvatures.curvature(), [](double s) { return sech(s); }) < 1e-5);
  CHECK(max_dev(fr.curvatures.torsion(), [](double s) { return std::tanh(s); }) < 1e-5);

  const SynthesisResult down = synthesize_orthogonal(e3, f, kappa, 0.0, -1, start);
  CHECK(down.report.pass());
  const FrenetData fr2 = frenet_apparatus(down.synthesized.curve);
  CHECK(max_dev(fr2.curvatures.torsion(), [](double s) { return -std::tanh(s); }) < 1e-5);

  CHECK(code_of([&] { synthesize_orthogonal(e3, ScalarSeries::constant(g, 0), kappa, 0.0, 1); }) ==
        ErrorCode::ParallelCase);
  CHECK(code_of([&] { synthesize_orthogonal(e3, f, kappa, 0.0, 2); }) == ErrorCode::Usage);
}

TEST_CASE("surface synthesis") {
  const Grid g = Grid::uniform(-2, 2, 1e-3);
  SUBCASE("grim reaper") {
    const SynthesisResult r = synthesize_pa_surface(ManifoldModel::euclidean(2), ScalarSeries::constant(g, 0),
                                                    sampled("atan(sinh(s))", g));
    CHECK(r.report.pass());
    CHECK(max_dev(r.synthesized.frenet.curvatures.curvature(), [](double s) { return sech(s); }) < 1e-9);
  }
  SUBCASE("constant angle gives constant curvature") {
    const SynthesisResult r = synthesize_pa_surface(ManifoldModel::euclidean(2), ScalarSeries::constant(g, 2),
                                                    ScalarSeries::constant(g, std::numbers::pi / 3));
    CHECK(r.report.pass());
    CHECK(max_dev(r.synthesized.frenet.curvatures.curvature(), [](double) { return -1.0; }) < 1e-12);
  }
  SUBCASE("leaving the half-plane") {
    // A geodesic heading straight down reaches y = 1e-8 after arc length ~18.4.
    const Grid long_grid = Grid::uniform(0, 20, 1e-3);
    SynthesisStart start;
    start.p0 = vec({0, 1});
    start.frame0 = {vec({0, -1})};
    CHECK(code_of([&] {
            synthesize_pa_surface(ManifoldModel::half_space(2), ScalarSeries::constant(long_grid, 0),
                                  ScalarSeries::constant(long_grid, 0), start);
          }) == ErrorCode::Domain);
  }
}

TEST_CASE("shipped parameter sets") {
  const std::filesystem::path dir = std::filesystem::path(PACURVES_SOURCE_DIR) / "data" / "synthesis";
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().filename().string());
    const SynthesisSpec spec = parse_synthesis_spec(testing::slurp(entry.path().string()));
    CHECK(run_synthesis_spec(spec).report.pass());
    ++count;
  }
  CHECK(count >= 8);
}

TEST_CASE("malformed parameter sets") {
  CHECK(code_of([] { parse_synthesis_spec("{"); }) == ErrorCode::Usage);
  CHECK(code_of([] { parse_synthesis_spec(R"({"kind": "spiral", "model": "euclidean:3", "span": [0, 1]})"); }) ==
        ErrorCode::Usage);
}
