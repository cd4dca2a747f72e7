#include "pacurves/pa_synthesis.hpp"

#include "pacurves/error.hpp"
#include "pacurves/expression.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace pacurves {

namespace {

std::string interval_text(const Grid& g, const std::vector<bool>& bad) {
  std::ostringstream out;
  out.precision(6);
  bool first = true;
  for (std::size_t i = 0; i < bad.size(); ++i) {
    if (!bad[i]) continue;
    std::size_t j = i;
    while (j + 1 < bad.size() && bad[j + 1]) ++j;
    out << (first ? "" : ", ") << "[" << g[i] << ", " << g[j] << "]";
    first = false;
    i = j;
  }
  return out.str();
}

void require_positive(const ScalarSeries& kappa, const char* what) {
  std::vector<bool> bad(kappa.size());
  bool any = false;
  for (std::size_t i = 0; i < kappa.size(); ++i) {
    bad[i] = !(kappa[i] > 0.0);
    any = any || bad[i];
  }
  if (any) {
    throw Error(ErrorCode::Infeasible,
                std::string(what) + " is not positive on " + interval_text(kappa.grid, bad));
  }
}

std::vector<Vec> start_frame(const ManifoldModel& model, const Vec& p0, const std::vector<Vec>& given) {
  const int m = model.dim();
  if (given.empty()) return model.canonical_frame(p0);
  for (const Vec& v : given) {
    if (v.size() != model.coord_dim()) throw Error(ErrorCode::Input, "initial frame vector has wrong size");
  }
  std::vector<Vec> frame = model.orthonormalize(p0, given);
  if (static_cast<int>(frame.size()) == m - 1) frame.push_back(model.complete_frame(p0, frame));
  if (static_cast<int>(frame.size()) != m) throw Error(ErrorCode::Input, "initial frame needs m (or m - 1) vectors");
  return frame;
}

// Angles agree up to whole turns; align at the middle node before comparing.
std::vector<double> angle_error(const ScalarSeries& got, const ScalarSeries& want) {
  const std::size_t mid = got.grid.mid_index();
  const double turns = std::round((got[mid] - want[mid]) / (2 * std::numbers::pi));
  std::vector<double> e(got.size());
  for (std::size_t i = 0; i < got.size(); ++i) e[i] = got[i] - want[i] - turns * 2 * std::numbers::pi;
  return e;
}

std::vector<double> field_error(const ArcLengthCurve& curve, const FieldAlongCurve& a, const FieldAlongCurve& b) {
  std::vector<double> e(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) e[i] = curve.model.norm(curve.points[i], a.vectors[i] - b.vectors[i]);
  return e;
}

// Everything that can be checked after a synthesis: the prescribed system, the
// analysis round trip, the law, transport and integration drift.
void verify(SynthesisResult& out, const ScalarSeries& f, std::size_t anchor, double tolerance) {
  const ArcLengthCurve& curve = out.synthesized.curve;
  const CurvatureProfile& prescribed_k = out.synthesized.frenet.curvatures;
  Report& report = out.report;
  const int m = curve.model.dim();

  const ResidualReport system = pa_system_residuals(prescribed_k, f, out.prescribed, 1e-8);
  system.export_to(report, "prescribed_system_");

  report.add(make_scalar_quantity("frame_gram_defect", out.synthesized.max_gram_defect, 1e-8));
  if (curve.model.embedded()) {
    report.add(make_scalar_quantity("constraint_drift", out.synthesized.max_constraint_drift, 1e-8));
  }

  const FrenetData frenet = frenet_apparatus(curve);
  for (int j = 0; j < m - 1; ++j) {
    const std::string name = j == 0 ? "kappa_recovered" : (j == 1 ? "tau_recovered" : "kappa" + std::to_string(j + 1) + "_recovered");
    report.add(make_quantity(name,
                             difference(frenet.curvatures.kappa[static_cast<std::size_t>(j)].values,
                                        prescribed_k.kappa[static_cast<std::size_t>(j)].values),
                             tolerance));
  }

  const PADecomposition decomp = decompose(curve, frenet, out.field);
  report.add(make_quantity("theta_recovered", angle_error(decomp.oriented_theta, out.prescribed.oriented_theta), tolerance));
  report.add(make_quantity("cos_theta_recovered", difference(decomp.cos_theta.values, out.prescribed.cos_theta.values),
                           tolerance));
  for (std::size_t i = 0; i < decomp.lambdas.size(); ++i) {
    report.add(make_quantity("lambda" + std::to_string(i) + "_recovered",
                             difference(decomp.lambdas[i].values, out.prescribed.lambdas[i].values), tolerance));
  }

  const LawEstimate law = estimate_law(curve, out.field);
  report.add(make_scalar_quantity("law_residual", law.max_residual, 1e-6));
  report.add(make_quantity("f_recovered", difference(law.law.f.values, f.values), tolerance));
  report.add(make_quantity("omega_recovered", difference(law.law.omega_t.values, out.law.omega_t.values), tolerance));

  const FieldAlongCurve transported = transport_field(curve, out.law, out.field.vectors[anchor], curve.grid[anchor]);
  report.add(make_quantity("transport_vs_assembled", field_error(curve, transported, out.field), 1e-6));

  if (m == 3 && max_abs(out.prescribed.lambdas[0].values) == 0.0) {
    const double f0 = f[f.grid.mid_index()];
    bool constant_f = true;
    for (double x : f.values) constant_f = constant_f && std::abs(x - f0) <= 1e-12 * std::max(1.0, std::abs(f0));
    const ScalarSeries& tau = frenet.curvatures.torsion();
    bool twisted = true;
    for (double t : tau.values) twisted = twisted && std::abs(t) >= 1e-6;
    if (constant_f && twisted) {
      geodesic_sphere_residual(frenet.curvatures, tolerance).export_to(report, "");
      if (curve.model.kind() == ModelKind::Euclidean) {
        // V = f (gamma - c) for a concircular field of constant f in flat space.
        std::vector<Vec> centers(curve.grid.size());
        Vec mean = Vec::Zero(3);
        for (std::size_t i = 0; i < centers.size(); ++i) {
          centers[i] = curve.points[i] - out.field.vectors[i] / f0;
          mean += centers[i];
        }
        mean /= static_cast<double>(centers.size());
        std::vector<double> spread(centers.size());
        for (std::size_t i = 0; i < centers.size(); ++i) spread[i] = (centers[i] - mean).norm();
        report.add(make_quantity("sphere_center_spread", spread, tolerance));
      }
    }
  }
}

SynthesisResult finish(const ManifoldModel& model, const CurvatureProfile& profile, PADecomposition prescribed,
                       const ScalarSeries& f, const SynthesisStart& start, double tolerance) {
  const Grid& grid = prescribed.grid();
  const Vec p0 = start.p0 ? *start.p0 : default_point(model);
  model.check_point(p0);
  const std::vector<Vec> frame0 = start_frame(model, p0, start.frame0);
  const std::size_t anchor = start.anchor_s ? grid.index_of(*start.anchor_s) : 0;

  SynthesizedCurve synth = frenet_synthesize(model, profile, p0, frame0, grid, grid[anchor]);
  FieldAlongCurve field = assemble_field(synth.frenet, prescribed);
  std::vector<double> omega(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) omega[i] = -f[i] * prescribed.lambdas[0][i];
  TorseFormingLaw law{f, ScalarSeries(grid, omega), TorseClass::AntiTorqued};

  SynthesisResult out{std::move(synth), std::move(prescribed), std::move(field), std::move(law), {}};
  out.report.subject = {{"model", model.spec()}};
  verify(out, f, anchor, tolerance);
  return out;
}

void require_grid(const ScalarSeries& a, const ScalarSeries& b, const char* what) {
  if (!(a.grid == b.grid)) throw Error(ErrorCode::Input, std::string(what) + " is sampled on a different grid");
}

}  // namespace

Vec default_point(const ManifoldModel& model) {
  Vec p = Vec::Zero(model.coord_dim());
  if (model.embedded()) p[model.coord_dim() - 1] = model.radius();
  if (model.kind() == ModelKind::HyperbolicHalfSpace) p[model.dim() - 1] = 1.0;
  return p;
}

SynthesisResult synthesize_pa_3d(const ManifoldModel& model, const ScalarSeries& f, const ScalarSeries& theta,
                                 const ScalarSeries& lambda0, int sign, const SynthesisStart& start,
                                 double tolerance) {
  if (model.dim() != 3) throw Error(ErrorCode::Unsupported, "PA synthesis from (f, theta, lambda_0) needs m = 3");
  require_grid(f, theta, "potential function");
  require_grid(lambda0, theta, "lambda_0");
  PADecomposition decomp = decomposition_3d(theta, lambda0, sign);
  const CurvatureProfile profile = curvatures_from_pa(f, decomp, CurvatureMode::General3d);
  require_positive(profile.curvature(), "curvature");
  if (max_abs(profile.torsion().values) <= 1e-9) {
    throw Error(ErrorCode::Infeasible, "torsion vanishes identically; the curve is planar and has no binormal");
  }
  return finish(model, profile, std::move(decomp), f, start, tolerance);
}

SynthesisResult synthesize_orthogonal(const ManifoldModel& model, const ScalarSeries& f, const ScalarSeries& kappa,
                                      double r, int sign, const SynthesisStart& start, double tolerance) {
  if (model.dim() != 3) throw Error(ErrorCode::Unsupported, "orthogonal-angle synthesis needs m = 3");
  if (sign != 1 && sign != -1) throw Error(ErrorCode::Usage, "branch sign must be +1 or -1");
  require_grid(f, kappa, "potential function");
  if (max_abs(f.values) <= 1e-6) {
    throw Error(ErrorCode::ParallelCase, "potential function vanishes; theta = pi/2 would make the field parallel");
  }
  require_positive(kappa, "curvature");
  const Grid& g = f.grid;
  const double p_anchor = start.anchor_s.value_or(g.front());
  const ScalarSeries p = cumulative_integral(f, p_anchor, r);

  const std::size_t n = g.size();
  std::vector<double> tau(n), l0(n), dl0(n), l1(n), dl1(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double th = std::tanh(p[i]);
    const double sech = 1.0 / std::cosh(p[i]);
    tau[i] = sign * kappa[i] * std::sinh(p[i]);
    l0[i] = th;
    dl0[i] = sech * sech * f[i];
    l1[i] = sign * sech;
    dl1[i] = -sign * sech * th * f[i];
  }
  PADecomposition decomp{ScalarSeries::constant(g, std::numbers::pi / 2),
                         ScalarSeries::constant(g, sign * std::numbers::pi / 2), ScalarSeries::constant(g, 0.0),
                         {ScalarSeries(g, l0, dl0), ScalarSeries(g, l1, dl1)}};
  const CurvatureProfile profile{{kappa, ScalarSeries(g, tau)}};
  SynthesisResult out = finish(model, profile, std::move(decomp), f, start, tolerance);
  out.report.subject.emplace_back("r", std::to_string(r));
  return out;
}

SynthesisResult synthesize_pa_surface(const ManifoldModel& model, const ScalarSeries& f, const ScalarSeries& theta,
                                      const SynthesisStart& start, double tolerance) {
  if (model.dim() != 2) throw Error(ErrorCode::Unsupported, "surface synthesis needs m = 2");
  require_grid(f, theta, "potential function");
  PADecomposition decomp = decomposition_2d(theta);
  const SurfaceCurvature sc = surface_pa_curvature(f, decomp);
  return finish(model, CurvatureProfile{{sc.kappa}}, std::move(decomp), f, start, tolerance);
}

// ---------------------------------------------------------------- parameter files

SynthesisSpec parse_synthesis_spec(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Usage, std::string("synthesis parameters are not valid JSON: ") + e.what());
  }
  try {
    SynthesisSpec spec;
    spec.name = doc.at("name").get<std::string>();
    spec.kind = doc.at("kind").get<std::string>();
    if (spec.kind != "pa3d" && spec.kind != "orthogonal" && spec.kind != "surface") {
      throw Error(ErrorCode::Usage, "unknown synthesis kind '" + spec.kind + "'");
    }
    spec.model = doc.at("model").get<std::string>();
    const auto span = doc.at("span").get<std::vector<double>>();
    if (span.size() != 2) throw Error(ErrorCode::Usage, "span must have two entries");
    spec.a = span[0];
    spec.b = span[1];
    spec.step = doc.value("step", 1e-3);
    spec.f = doc.at("f").get<std::string>();
    if (spec.kind == "orthogonal") {
      spec.kappa = doc.at("kappa").get<std::string>();
      spec.r = doc.value("r", 0.0);
    } else {
      spec.theta = doc.at("theta").get<std::string>();
    }
    spec.lambda0 = doc.value("lambda0", std::string("0"));
    spec.sign = doc.value("sign", 1);
    if (doc.contains("p0")) spec.p0 = doc["p0"].get<std::vector<double>>();
    if (doc.contains("frame0")) spec.frame0 = doc["frame0"].get<std::vector<std::vector<double>>>();
    if (doc.contains("anchor")) spec.anchor = doc["anchor"].get<double>();
    if (doc.contains("expect")) {
      for (const auto& [key, value] : doc["expect"].items()) spec.expect.emplace_back(key, value.get<std::string>());
    }
    if (doc.contains("lancret")) {
      spec.lancret_r0 = doc["lancret"].at("r0").get<double>();
      spec.lancret_f0 = doc["lancret"].at("f0").get<double>();
    }
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Usage, std::string("bad synthesis parameters: ") + e.what());
  }
}

SynthesisResult run_synthesis_spec(const SynthesisSpec& spec, double tolerance) {
  const ManifoldModel model = ManifoldModel::parse(spec.model);
  const Grid grid = Grid::uniform(spec.a, spec.b, spec.step);
  const ScalarSeries f = sample(Expression::parse(spec.f), grid);

  SynthesisStart start;
  auto to_vec = [](const std::vector<double>& v) { return Vec(Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()))); };
  if (spec.p0) start.p0 = to_vec(*spec.p0);
  for (const auto& v : spec.frame0) start.frame0.push_back(to_vec(v));
  start.anchor_s = spec.anchor;

  SynthesisResult out = [&] {
    if (spec.kind == "orthogonal") {
      return synthesize_orthogonal(model, f, sample(Expression::parse(spec.kappa), grid), spec.r, spec.sign, start,
                                   tolerance);
    }
    const ScalarSeries theta = sample(Expression::parse(spec.theta), grid);
    if (spec.kind == "surface") return synthesize_pa_surface(model, f, theta, start, tolerance);
    return synthesize_pa_3d(model, f, theta, sample(Expression::parse(spec.lambda0), grid), spec.sign, start,
                            tolerance);
  }();

  out.report.subject.insert(out.report.subject.begin(), {"name", spec.name});
  out.report.subject.emplace_back("kind", spec.kind);

  const ArcLengthCurve& curve = out.synthesized.curve;
  const FrenetData frenet = frenet_apparatus(curve);
  for (const auto& [name, text] : spec.expect) {
    const ScalarSeries want = sample(Expression::parse(text), grid);
    const ScalarSeries* got = nullptr;
    if (name == "kappa") got = &frenet.curvatures.curvature();
    if (name == "tau" && frenet.curvatures.kappa.size() > 1) got = &frenet.curvatures.torsion();
    if (!got) throw Error(ErrorCode::Usage, "unknown expectation '" + name + "'");
    out.report.add(make_quantity("expected_" + name, difference(got->values, want.values), tolerance));
  }
  if (spec.lancret_r0 && spec.lancret_f0) {
    const double r0 = *spec.lancret_r0;
    const double f0 = *spec.lancret_f0;
    std::vector<double> e;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double u = r0 * f0 * grid[i];
      if (std::abs(grid[i]) > 0.9 / std::abs(r0 * f0)) continue;
      e.push_back(std::abs(frenet.curvatures.curvature()[i]) - std::abs(f0) / std::sqrt(1.0 - u * u));
    }
    out.report.add(make_quantity("lancret_closed_form_kappa", e, 1e-5));
    const PADecomposition decomp = decompose(curve, frenet, out.field);
    const LancretReport lr = lancret_concircular_check(f, decomp, frenet.curvatures, 1e-5);
    out.report.add(make_scalar_quantity("lancret_r0", lr.r0 - r0, 1e-5));
  }
  return out;
}

}  // namespace pacurves
