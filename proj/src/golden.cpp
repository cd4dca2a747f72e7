#include "pacurves/golden.hpp"

#include "pacurves/error.hpp"
#include "pacurves/expression.hpp"
#include "pacurves/pa_analysis.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pacurves {

namespace detail {
const std::map<std::string, std::string>& embedded_fixtures();
}

namespace {

using Json = nlohmann::json;

std::string number_text(double x) {
  std::ostringstream out;
  out.precision(12);
  out << x;
  return out.str();
}

Vec to_vec(const std::vector<double>& v) {
  return Vec(Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())));
}

// One coordinate function: a closed form, or an antiderivative of one.
ScalarSeries coordinate(const Json& spec, const Grid& grid, const Expression::Definitions& defs) {
  if (spec.is_string()) return sample(Expression::parse(spec.get<std::string>(), "s", defs), grid);
  const ScalarSeries integrand = sample(Expression::parse(spec.at("integral").get<std::string>(), "s", defs), grid);
  const ScalarSeries integral = cumulative_integral(integrand, spec.value("from", 0.0), 0.0);
  return ScalarSeries(grid, integral.values, integrand.values);
}

std::vector<double> field_errors(const ArcLengthCurve& curve, const FieldAlongCurve& a, const FieldAlongCurve& b) {
  std::vector<double> e(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) e[i] = curve.model.norm(curve.points[i], a.vectors[i] - b.vectors[i]);
  return e;
}

void check_consistent(bool ok, const std::string& id, const std::string& what) {
  if (!ok) throw Error(ErrorCode::Input, "fixture " + id + " is inconsistent: " + what);
}

void check_fixture(const GoldenFixture& fx) {
  const Grid& g = fx.curve.grid;
  const int m = fx.curve.model.dim();
  if (fx.field) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double len = fx.curve.model.norm(fx.curve.points[i], fx.field->vectors[i]);
      check_consistent(std::abs(len - 1.0) <= 1e-10, fx.id, "field is not unit length");
    }
  }
  const auto has = [&](const char* k) { return fx.expected.count(k) > 0; };
  if (has("cos_theta") && has("lambda0") && (m == 2 || has("lambda1"))) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      double sum = std::pow(fx.expected.at("cos_theta")[i], 2) + std::pow(fx.expected.at("lambda0")[i], 2);
      if (m == 3) sum += std::pow(fx.expected.at("lambda1")[i], 2);
      check_consistent(std::abs(sum - 1.0) <= 1e-10, fx.id, "expected angle and coefficients violate the norm identity");
    }
  }
  if (fx.builtin_law && has("f")) {
    check_consistent(max_abs(difference(fx.builtin_law->f.values, fx.expected.at("f").values)) <= 1e-10, fx.id,
                     "expected f differs from the field's potential");
  }
  if (has("kappa") && has("tau") && has("tau_over_kappa")) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double ratio = fx.expected.at("tau")[i] / fx.expected.at("kappa")[i];
      check_consistent(std::abs(ratio - fx.expected.at("tau_over_kappa")[i]) <= 1e-10, fx.id, "tau/kappa");
    }
  }
  if (fx.transport) {
    const std::size_t k = g.index_of(fx.transport->anchor_s);
    check_consistent((fx.transport->expected.vectors[k] - fx.transport->v0).norm() <= 1e-12, fx.id,
                     "transport initial vector differs from the closed form");
  }
}

}  // namespace

std::vector<std::string> fixture_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, text] : detail::embedded_fixtures()) ids.push_back(id);
  return ids;
}

GoldenFixture load_fixture(const std::string& id, std::optional<double> step) {
  const auto& table = detail::embedded_fixtures();
  const auto it = table.find(id);
  if (it == table.end()) throw Error(ErrorCode::Usage, "unknown fixture '" + id + "'");
  return parse_fixture(it->second, step);
}

GoldenFixture parse_fixture(const std::string& json_text, std::optional<double> step) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Usage, std::string("fixture is not valid JSON: ") + e.what());
  }
  try {
    const std::string id = doc.at("id").get<std::string>();
    const ManifoldModel model = ManifoldModel::parse(doc.at("model").get<std::string>());
    const auto span = doc.at("span").get<std::vector<double>>();
    if (span.size() != 2) throw Error(ErrorCode::Usage, "fixture span must have two entries");
    const Grid grid = Grid::uniform(span[0], span[1], step.value_or(doc.at("step").get<double>()));
    Expression::Definitions defs;
    if (doc.contains("definitions")) defs = doc["definitions"].get<Expression::Definitions>();

    const Json& coords = doc.at("curve");
    if (static_cast<int>(coords.size()) != model.coord_dim()) {
      throw Error(ErrorCode::Usage, "fixture curve has the wrong number of coordinates");
    }
    std::vector<ScalarSeries> xs;
    for (const Json& c : coords) xs.push_back(coordinate(c, grid, defs));
    std::vector<Vec> points(grid.size(), Vec(model.coord_dim()));
    std::vector<Vec> velocity(grid.size(), Vec(model.coord_dim()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (std::size_t j = 0; j < xs.size(); ++j) {
        points[i][static_cast<Eigen::Index>(j)] = xs[j][i];
        velocity[i][static_cast<Eigen::Index>(j)] = (*xs[j].exact_derivative)[i];
      }
    }

    GoldenFixture fx{id,
                     doc.value("title", std::string()),
                     ArcLengthCurve::from_samples(model, grid, std::move(points), std::move(velocity)),
                     std::nullopt,
                     std::nullopt,
                     std::nullopt,
                     {},
                     std::nullopt,
                     {},
                     {}};
    if (doc.contains("builtin")) {
      const Json& b = doc["builtin"];
      const BuiltinField builtin = builtin_field(model, parse_builtin_kind(b.at("kind").get<std::string>()),
                                                 b.value("params", std::vector<double>{}));
      RestrictedField restricted = restrict_to(builtin, fx.curve);
      fx.field = std::move(restricted.field);
      fx.builtin_law = std::move(restricted.law);
    }
    if (doc.contains("class")) fx.expected_class = parse_torse_class(doc["class"].get<std::string>());
    if (doc.contains("expected")) {
      for (const auto& [name, text] : doc["expected"].items()) {
        fx.expected.emplace(name, sample(Expression::parse(text.get<std::string>(), "s", defs), grid));
      }
    }
    if (doc.contains("transport")) {
      const Json& t = doc["transport"];
      TransportCase tc{TorseFormingLaw{sample(Expression::parse(t.at("f").get<std::string>(), "s", defs), grid),
                                       sample(Expression::parse(t.at("omega").get<std::string>(), "s", defs), grid),
                                       parse_torse_class(t.value("class", std::string("generic")))},
                       t.value("at", grid.front()), to_vec(t.at("v0").get<std::vector<double>>()),
                       FieldAlongCurve{grid, {}}};
      std::vector<ScalarSeries> comps;
      for (const Json& c : t.at("expected")) comps.push_back(sample(Expression::parse(c.get<std::string>(), "s", defs), grid));
      if (static_cast<int>(comps.size()) != model.coord_dim() || tc.v0.size() != model.coord_dim()) {
        throw Error(ErrorCode::Usage, "transport vectors have the wrong size");
      }
      for (std::size_t i = 0; i < grid.size(); ++i) {
        Vec v(model.coord_dim());
        for (std::size_t j = 0; j < comps.size(); ++j) v[static_cast<Eigen::Index>(j)] = comps[j][i];
        tc.expected.vectors.push_back(std::move(v));
      }
      fx.transport = std::move(tc);
    }
    if (doc.contains("parameters")) fx.parameters = doc["parameters"].get<std::map<std::string, double>>();
    if (doc.contains("checks")) fx.checks = doc["checks"].get<std::vector<std::string>>();
    check_fixture(fx);
    return fx;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Usage, std::string("bad fixture: ") + e.what());
  }
}

Report run_golden(const std::string& id, const GoldenTolerances& tolerances) {
  return run_golden(load_fixture(id), tolerances);
}

Report run_golden(const GoldenFixture& fx, const GoldenTolerances& tol) {
  const ArcLengthCurve& curve = fx.curve;
  const Grid& g = curve.grid;
  Report report;
  report.subject_key = "fixture";
  report.subject = {{"id", fx.id},
                    {"title", fx.title},
                    {"model", curve.model.spec()},
                    {"span", number_text(g.front()) + ":" + number_text(g.back())},
                    {"nodes", std::to_string(g.size())}};

  const auto expected = [&](const std::string& name) -> const ScalarSeries* {
    const auto it = fx.expected.find(name);
    return it == fx.expected.end() ? nullptr : &it->second;
  };
  const auto compare = [&](const std::string& name, const ScalarSeries& got, const std::string& key, double tolerance) {
    if (const ScalarSeries* want = expected(key)) {
      report.add(make_quantity(name, difference(got.values, want->values), tolerance));
    }
  };
  const auto has_check = [&](const char* name) {
    return std::find(fx.checks.begin(), fx.checks.end(), name) != fx.checks.end();
  };
  const auto parameter = [&](const std::string& name) {
    const auto it = fx.parameters.find(name);
    if (it == fx.parameters.end()) throw Error(ErrorCode::Usage, "fixture " + fx.id + " lacks parameter " + name);
    return it->second;
  };

  const FrenetData frenet = frenet_apparatus(curve);
  const CurvatureProfile& k = frenet.curvatures;
  report.add(make_scalar_quantity("frenet_residual", frenet_residual(curve, frenet), tol.residual));
  compare("kappa", k.curvature(), "kappa", tol.profile);
  if (k.kappa.size() > 1) {
    compare("tau", k.torsion(), "tau", tol.profile);
    std::vector<double> ratio(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) ratio[i] = k.torsion()[i] / k.curvature()[i];
    compare("tau_over_kappa", ScalarSeries(g, ratio), "tau_over_kappa", tol.coefficient);
  }

  if (fx.field) {
    const PADecomposition decomp = decompose(curve, frenet, *fx.field);
    const LawEstimate law = estimate_law(curve, *fx.field);
    const ScalarSeries& f = law.law.f;
    report.add(make_scalar_quantity("law_residual", law.max_residual, tol.law_residual));
    if (fx.expected_class) {
      report.add(make_scalar_quantity(std::string("law_class_") + to_string(*fx.expected_class),
                                      law.law.cls == *fx.expected_class ? 0.0 : 1.0, 0.0));
    }
    if (!law.note.empty()) report.notes.push_back(law.note);
    compare("f", f, "f", tol.coefficient);
    compare("omega", law.law.omega_t, "omega", tol.coefficient);
    compare("cos_theta", decomp.cos_theta, "cos_theta", tol.profile);
    compare("lambda0", decomp.lambdas[0], "lambda0", tol.coefficient);
    if (decomp.lambdas.size() > 1) compare("lambda1", decomp.lambdas[1], "lambda1", tol.coefficient);
    pa_system_residuals(k, f, decomp, tol.residual).export_to(report, "system_");

    if (has_check("rectifying")) {
      std::vector<double> e(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) e[i] = curve.points[i].dot(frenet.normal().vectors[i]);
      report.add(make_quantity("position_dot_normal", e, tol.rectifying));
    }
    if (has_check("normal_dt")) {
      std::vector<double> e(g.size());
      const Vec dt = Vec::Unit(curve.model.coord_dim(), 0);
      for (std::size_t i = 0; i < g.size(); ++i) e[i] = curve.model.inner(curve.points[i], frenet.normal().vectors[i], dt);
      report.add(make_quantity("normal_dot_dt", e, tol.normal_dt));
    }
    if (has_check("orthogonal")) {
      const OrthogonalAnalysis oa = orthogonal_angle_analysis(k, f, decomp, tol.coefficient);
      oa.fit.export_to(report, "orthogonal_");
      compare("p", oa.p, "p", tol.coefficient);
      report.notes.push_back("orthogonal branch " + std::to_string(oa.branch));
    }
    if (has_check("concircular_curvatures")) {
      const CurvatureProfile conc = curvatures_from_pa(f, decomp, CurvatureMode::Concircular);
      const CurvatureProfile general = curvatures_from_pa(f, decomp, CurvatureMode::General3d);
      report.add(make_quantity("kappa_concircular_vs_frenet", difference(conc.curvature().values, k.curvature().values), tol.residual));
      report.add(make_quantity("tau_concircular_vs_frenet", difference(conc.torsion().values, k.torsion().values), tol.residual));
      report.add(make_quantity("kappa_general_vs_frenet", difference(general.curvature().values, k.curvature().values), tol.residual));
      report.add(make_quantity("tau_general_vs_frenet", difference(general.torsion().values, k.torsion().values), tol.residual));
    }
    if (has_check("geodesic_sphere")) geodesic_sphere_residual(k, tol.residual).export_to(report, "");
    if (has_check("sphere_fit")) {
      const SphereFit fit = sphere_potential_fit(f, decomp.oriented_theta);
      report.add(make_scalar_quantity("sphere_fit_a", fit.a - parameter("sphere_a"), tol.fit));
      report.add(make_scalar_quantity("sphere_fit_b", fit.b - parameter("sphere_b"), tol.fit));
    }
    if (has_check("lancret")) {
      const LancretReport lr = lancret_concircular_check(f, decomp, k, tol.lancret);
      report.add(make_scalar_quantity("lancret_r0", lr.r0 - parameter("lancret_r0"), tol.lancret));
      lr.residuals.export_to(report, "lancret_");
    }
    if (has_check("surface_curvature")) {
      compare("kappa_surface_relation", surface_pa_curvature(f, decomp).kappa, "kappa", tol.profile);
    }
    if (has_check("grim_reaper")) {
      const GrimReaperCheck grim = grim_reaper_check(k.curvature(), f, decomp, tol.profile);
      grim.residuals.export_to(report, "grim_reaper_");
      report.notes.push_back("grim reaper constant " + number_text(grim.constant));
    }
  }
  if (has_check("halfplane")) {
    const ScalarSeries kh = halfplane_curvature(curve);
    compare("kappa_halfplane_relation", kh, "kappa", tol.profile);
    report.add(make_quantity("kappa_paths_agree", difference(kh.values, k.curvature().values), tol.profile));
  }
  if (has_check("transport")) {
    if (!fx.transport) throw Error(ErrorCode::Usage, "fixture " + fx.id + " has no transport case");
    const TransportCase& tc = *fx.transport;
    const FieldAlongCurve v = transport_field(curve, tc.law, tc.v0, tc.anchor_s);
    report.add(make_quantity("transported_field", field_errors(curve, v, tc.expected), tol.profile));
    const LawEstimate law = estimate_law(curve, v);
    report.add(make_quantity("transport_f_recovered", difference(law.law.f.values, tc.law.f.values), tol.coefficient));
  }
  return report;
}

}  // namespace pacurves
