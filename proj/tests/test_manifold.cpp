#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include "pacurves/pa_synthesis.hpp"

using namespace pacurves;
using testing::vec;

namespace {

// A smooth twisted unit-speed curve in any shipped model.
ArcLengthCurve wiggle(const ManifoldModel& model, double h = 1e-3) {
  const Grid g = Grid::uniform(-1, 1, h);
  CurvatureProfile p;
  p.kappa.push_back(ScalarSeries::from_function(g, [](double s) { return 1 + 0.3 * std::sin(s); }));
  for (int j = 2; j < model.dim(); ++j) p.kappa.push_back(ScalarSeries::constant(g, 0.5));
  const Vec p0 = default_point(model);
  return frenet_synthesize(model, p, p0, model.canonical_frame(p0), g).curve;
}

const char* const kModels[] = {"euclidean:3", "sphere:3:1.5", "halfspace:3", "hyperboloid:3:2", "warped:3:cosh(t)",
                               "euclidean:2", "halfspace:2"};

}  // namespace

TEST_CASE("model specs round trip") {
  for (const char* spec : kModels) CHECK(ManifoldModel::parse(spec).spec() == spec);
  CHECK_THROWS_AS(ManifoldModel::parse("torus:2"), Error);
  CHECK_THROWS_AS(ManifoldModel::parse("sphere:3:-1"), Error);
  CHECK_THROWS_AS(ManifoldModel::parse("euclidean:1"), Error);
  CHECK(model_catalog().size() == 5);
}

TEST_CASE("metric examples") {
  const auto e3 = ManifoldModel::euclidean(3);
  const Vec o = vec({0, 0, 0});
  CHECK(metric_eval(e3, o, {o, vec({1, 0, 0})}, {o, vec({1, 0, 0})}) == 1.0);

  const auto h2 = ManifoldModel::half_space(2);
  const Vec p = vec({0, 2});
  CHECK(metric_eval(h2, p, {p, vec({1, 0})}, {p, vec({1, 0})}) == doctest::Approx(0.25));

  const auto w = ManifoldModel::warped(3, "exp(t)");
  CHECK(metric_eval(w, o, {o, vec({0, 1, 0})}, {o, vec({0, 1, 0})}) == doctest::Approx(1.0));

  try {
    metric_eval(e3, o, {vec({1, 0, 0}), vec({1, 0, 0})}, {o, vec({1, 0, 0})});
    FAIL("expected a base-point error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Usage);
  }
  const Vec below = vec({0, -1});
  try {
    metric_eval(h2, below, {below, vec({1, 0})}, {below, vec({1, 0})});
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Domain);
  }
}

TEST_CASE("covariant derivative examples") {
  const Grid g = Grid::uniform(-1, 1, 1e-3);
  SUBCASE("constant field in flat space") {
    const auto c = testing::closed_curve(
        ManifoldModel::euclidean(3), g,
        [](double s) { return vec({std::cos(s / std::sqrt(2)), std::sin(s / std::sqrt(2)), s / std::sqrt(2)}); },
        [](double s) {
          const double r = 1 / std::sqrt(2);
          return vec({-r * std::sin(s * r), r * std::cos(s * r), r});
        });
    const FieldAlongCurve v{g, std::vector<Vec>(g.size(), vec({0.3, -1, 2}))};
    for (const Vec& d : covariant_derivative_along(c, v).vectors) CHECK(d.norm() < 1e-10);
  }
  SUBCASE("warped product, rho = e^t") {
    const auto w = ManifoldModel::warped(3, "exp(t)");
    // Along a t-line the unit fiber field e^-t d_x is parallel.
    const auto tline = testing::closed_curve(w, g, [](double s) { return vec({s, 0, 0}); },
                                             [](double) { return vec({1, 0, 0}); });
    FieldAlongCurve e1{g, {}};
    for (double s : g.nodes()) e1.vectors.push_back(vec({0, std::exp(-s), 0}));
    for (const Vec& d : covariant_derivative_along(tline, e1).vectors) CHECK(d.norm() < 1e-9);
    // Along the fiber direction at t = 0, nabla_{e_1} d_t = e_1.
    const auto fiber = testing::closed_curve(w, g, [](double s) { return vec({0, s, 0}); },
                                             [](double) { return vec({0, 1, 0}); });
    const FieldAlongCurve dt{g, std::vector<Vec>(g.size(), vec({1, 0, 0}))};
    const auto d = covariant_derivative_along(fiber, dt);
    for (const Vec& x : d.vectors) CHECK((x - vec({0, 1, 0})).norm() < 1e-10);
  }
  SUBCASE("great circle is a geodesic of the sphere") {
    const auto s2 = ManifoldModel::sphere(2, 1.0);
    const auto c = testing::closed_curve(s2, g, [](double s) { return vec({std::cos(s), std::sin(s), 0}); },
                                         [](double s) { return vec({-std::sin(s), std::cos(s), 0}); });
    for (const Vec& d : covariant_derivative_along(c, c.tangent_field()).vectors) CHECK(d.norm() < 1e-6);
  }
}

TEST_CASE("tangent projection examples") {
  const auto s2 = ManifoldModel::sphere(2, 1.0);
  const Vec pole = vec({0, 0, 1});
  CHECK((tangent_project(s2, pole, vec({1, 0, 0})).components - vec({1, 0, 0})).norm() == 0.0);
  const Vec p = vec({0.6, 0, 0.8});
  CHECK(tangent_project(s2, p, p).components.norm() < 1e-15);
  const auto h2 = ManifoldModel::hyperboloid(2, 1.0);
  CHECK(tangent_project(h2, pole, vec({0, 0, 1})).components.norm() < 1e-15);
  try {
    tangent_project(ManifoldModel::euclidean(3), vec({0, 0, 0}), vec({1, 0, 0}));
    FAIL("expected unsupported");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Unsupported);
  }
  // Idempotence.
  const auto s3 = ManifoldModel::sphere(3, 2.0);
  const Vec q = vec({1, 1, 1, 1});
  const Vec once = tangent_project(s3, q, vec({0.3, -2, 5, 1})).components;
  CHECK((tangent_project(s3, q, once).components - once).norm() <= 1e-15);
}

TEST_CASE("metric compatibility on every model") {
  const double h = 1e-3;
  for (const char* spec : kModels) {
    CAPTURE(spec);
    const ManifoldModel model = ManifoldModel::parse(spec);
    const ArcLengthCurve c = wiggle(model, h);
    const Grid& g = c.grid;
    FieldAlongCurve u{g, {}}, v{g, {}};
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double s = g[i];
      Vec a(model.coord_dim()), b(model.coord_dim());
      for (int j = 0; j < model.coord_dim(); ++j) {
        a[j] = 1 + j * s - 0.5 * s * s * s;
        b[j] = (j % 2 ? -1 : 1) * (0.3 + s * s) + j;
      }
      u.vectors.push_back(model.tangent_part(c.points[i], a));
      v.vectors.push_back(model.tangent_part(c.points[i], b));
    }
    const auto du = covariant_derivative_along(c, u), dv = covariant_derivative_along(c, v);
    std::vector<double> uv(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) uv[i] = model.inner(c.points[i], u.vectors[i], v.vectors[i]);
    const auto duv = differentiate_series(ScalarSeries(g, uv));
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double rhs = model.inner(c.points[i], du.vectors[i], v.vectors[i]) +
                         model.inner(c.points[i], u.vectors[i], dv.vectors[i]);
      worst = std::max(worst, std::abs(duv[i] - rhs));
    }
    CHECK(worst <= 10 * h * h);
  }
}

TEST_CASE("sphere connection agrees with the Gauss formula") {
  const double c = 1.5;
  const auto s3 = ManifoldModel::sphere(3, c);
  const ArcLengthCurve curve = wiggle(s3);
  const Grid& g = curve.grid;
  FieldAlongCurve y{g, {}};
  for (std::size_t i = 0; i < g.size(); ++i) {
    y.vectors.push_back(s3.tangent_part(curve.points[i], vec({std::sin(g[i]), 1, g[i] * g[i], -0.5})));
  }
  const auto lib = covariant_derivative_along(curve, y);
  const auto ambient = differentiate_series(VectorSeries(g, y.vectors));
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec expected = ambient.values[i] + curve.velocity[i].dot(y.vectors[i]) / (c * c) * curve.points[i];
    worst = std::max(worst, (lib.vectors[i] - expected).norm());
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("half-space guard") {
  const auto h2 = ManifoldModel::half_space(2);
  CHECK_THROWS_AS(h2.check_point(vec({0, 1e-9})), Error);
  CHECK_NOTHROW(h2.check_point(vec({0, 1e-7})));
}
