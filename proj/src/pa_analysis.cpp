#include "pacurves/pa_analysis.hpp"

#include "pacurves/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace pacurves {

namespace {

// Nodes at each end whose twice-differenced values lean on one-sided stencils.
constexpr std::size_t kTwiceDifferencedEdge = 6;

// Values and derivatives of a profile, used for chain-rule bookkeeping.
struct Profile {
  std::vector<double> v;
  std::vector<double> d;

  explicit Profile(std::size_t n) : v(n, 0.0), d(n, 0.0) {}
  explicit Profile(const ScalarSeries& x) : v(x.values), d(derivative_of(x).values) {}
  Profile(std::vector<double> values, std::vector<double> derivative) : v(std::move(values)), d(std::move(derivative)) {}

  ScalarSeries series(const Grid& g) const { return ScalarSeries(g, v, d); }
};

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw Error(ErrorCode::Input, std::string(what) + " is not sampled on the curve grid");
}

std::vector<double> unwrap(std::vector<double> angle) {
  for (std::size_t i = 1; i < angle.size(); ++i) {
    const double jump = angle[i] - angle[i - 1];
    angle[i] -= 2 * std::numbers::pi * std::round(jump / (2 * std::numbers::pi));
  }
  return angle;
}

// Signed angle atan2(y, x) with its derivative.
Profile angle_of(const Profile& y, const Profile& x) {
  const std::size_t n = x.v.size();
  std::vector<double> a(n);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = std::atan2(y.v[i], x.v[i]);
    const double r2 = x.v[i] * x.v[i] + y.v[i] * y.v[i];
    d[i] = (x.v[i] * y.d[i] - y.v[i] * x.d[i]) / r2;
  }
  return Profile(unwrap(std::move(a)), std::move(d));
}

// arccos of a cosine profile, derivative taken where sin theta != 0.
Profile arccos_of(const Profile& c) {
  const std::size_t n = c.v.size();
  std::vector<double> a(n);
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double ci = std::clamp(c.v[i], -1.0, 1.0);
    a[i] = std::acos(ci);
    const double si = std::sqrt(std::max(0.0, 1.0 - ci * ci));
    if (si > 0.0) d[i] = -c.d[i] / si;
  }
  return Profile(std::move(a), std::move(d));
}

std::size_t argmin_abs(const std::vector<double>& v) {
  std::size_t k = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) < std::abs(v[k])) k = i;
  }
  return k;
}

double max_abs_deviation(const std::vector<double>& v, double target) {
  double worst = 0.0;
  for (double x : v) worst = std::max(worst, std::abs(x - target));
  return worst;
}

std::string describe_interval(const Grid& g, const std::vector<bool>& bad) {
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

}  // namespace

// ---------------------------------------------------------------- decomposition

double PADecomposition::norm_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < cos_theta.size(); ++i) {
    double sum = cos_theta[i] * cos_theta[i];
    for (const ScalarSeries& l : lambdas) sum += l[i] * l[i];
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

std::vector<const ScalarSeries*> PADecomposition::frame_coefficients() const {
  std::vector<const ScalarSeries*> out{&lambdas.at(0), &cos_theta};
  for (std::size_t i = 1; i < lambdas.size(); ++i) out.push_back(&lambdas[i]);
  return out;
}

PADecomposition decompose(const ArcLengthCurve& curve, const FrenetData& frenet, const FieldAlongCurve& field) {
  const int m = curve.model.dim();
  require_same_grid(field.grid, curve.grid, "field");
  if (static_cast<int>(frenet.frame.size()) != m) throw Error(ErrorCode::Input, "Frenet frame has the wrong size");
  const std::size_t n = curve.grid.size();

  std::vector<std::vector<double>> c(static_cast<std::size_t>(m), std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const Vec& p = curve.points[i];
    const Vec& v = field.vectors[i];
    if (v.size() != curve.model.coord_dim()) throw Error(ErrorCode::Input, "field vector has wrong size");
    const double len = curve.model.norm(p, v);
    if (std::abs(len - 1.0) > kUnitFieldTolerance) {
      throw Error(ErrorCode::Input, "field is not unit length (|V| = " + std::to_string(len) + ")", curve.grid[i]);
    }
    for (int j = 0; j < m; ++j) {
      c[static_cast<std::size_t>(j)][i] = curve.model.inner(p, v, frenet.frame[static_cast<std::size_t>(j)].vectors[i]);
    }
  }

  const Grid& g = curve.grid;
  std::vector<double> theta(n);
  std::vector<double> oriented(n);
  const std::vector<double>& side = m == 2 ? c[0] : c[2];
  for (std::size_t i = 0; i < n; ++i) {
    theta[i] = std::acos(std::clamp(c[1][i], -1.0, 1.0));
    oriented[i] = std::atan2(side[i], c[1][i]);
  }
  PADecomposition out{ScalarSeries(g, theta), ScalarSeries(g, unwrap(oriented)), ScalarSeries(g, c[1]), {}};
  out.lambdas.emplace_back(g, c[0]);
  for (int j = 2; j < m; ++j) out.lambdas.emplace_back(g, c[static_cast<std::size_t>(j)]);
  return out;
}

PADecomposition decomposition_3d(const ScalarSeries& oriented_theta, const ScalarSeries& lambda0, int sign) {
  require_same_grid(lambda0.grid, oriented_theta.grid, "lambda_0");
  if (sign != 1 && sign != -1) throw Error(ErrorCode::Usage, "branch sign must be +1 or -1");
  const Grid& g = oriented_theta.grid;
  const std::size_t n = g.size();
  const Profile th(oriented_theta);
  const Profile l0(lambda0);
  const bool orthogonal_field = max_abs(l0.v) == 0.0;

  Profile cos_t(n);
  Profile l1(n);
  std::vector<bool> bad(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const double ct = std::cos(th.v[i]);
    const double st = std::sin(th.v[i]);
    cos_t.v[i] = ct;
    cos_t.d[i] = -st * th.d[i];
    if (orthogonal_field) {
      // lambda_1 = sin(theta) stays smooth through zeros of sin(theta).
      l1.v[i] = sign * st;
      l1.d[i] = sign * ct * th.d[i];
      continue;
    }
    const double q = 1.0 - l0.v[i] * l0.v[i] - ct * ct;
    if (!(q >= 1e-8)) {
      bad[i] = true;
      continue;
    }
    const double branch = st < 0 ? -sign : sign;
    l1.v[i] = branch * std::sqrt(q);
    l1.d[i] = (st * ct * th.d[i] - l0.v[i] * l0.d[i]) / l1.v[i];
  }
  if (std::find(bad.begin(), bad.end(), true) != bad.end()) {
    throw Error(ErrorCode::Infeasible, "lambda_0^2 + cos^2 theta exceeds 1 - 1e-8 on " + describe_interval(g, bad));
  }
  const Profile theta = arccos_of(cos_t);
  const Profile oriented = angle_of(l1, cos_t);
  PADecomposition out{theta.series(g), oriented.series(g), cos_t.series(g), {}};
  out.lambdas.push_back(l0.series(g));
  out.lambdas.push_back(l1.series(g));
  return out;
}

PADecomposition decomposition_2d(const ScalarSeries& oriented_theta) {
  const Grid& g = oriented_theta.grid;
  const std::size_t n = g.size();
  const Profile th(oriented_theta);
  Profile cos_t(n);
  Profile sin_t(n);
  for (std::size_t i = 0; i < n; ++i) {
    cos_t.v[i] = std::cos(th.v[i]);
    cos_t.d[i] = -std::sin(th.v[i]) * th.d[i];
    sin_t.v[i] = std::sin(th.v[i]);
    sin_t.d[i] = std::cos(th.v[i]) * th.d[i];
  }
  PADecomposition out{arccos_of(cos_t).series(g), th.series(g), cos_t.series(g), {}};
  out.lambdas.push_back(sin_t.series(g));
  return out;
}

FieldAlongCurve assemble_field(const FrenetData& frenet, const PADecomposition& decomp) {
  const auto coeffs = decomp.frame_coefficients();
  if (coeffs.size() != frenet.frame.size()) throw Error(ErrorCode::Input, "decomposition and frame sizes differ");
  const Grid& g = frenet.frame.front().grid;
  require_same_grid(decomp.grid(), g, "decomposition");
  std::vector<Vec> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    out[i] = Vec::Zero(frenet.frame.front().vectors[i].size());
    for (std::size_t j = 0; j < coeffs.size(); ++j) out[i] += (*coeffs[j])[i] * frenet.frame[j].vectors[i];
  }
  return FieldAlongCurve{g, std::move(out)};
}

// ---------------------------------------------------------------- residual reports

void ResidualReport::add(std::string name, ScalarSeries values) {
  const double mx = max_abs(values.values);
  const double r = rms(values.values);
  equations.push_back(ResidualSeries{std::move(name), std::move(values), mx, r});
  pass = std::isfinite(max_residual()) && max_residual() <= tolerance;
}

double ResidualReport::max_residual() const {
  double worst = 0.0;
  for (const ResidualSeries& e : equations) {
    if (!std::isfinite(e.max_abs)) return e.max_abs;
    worst = std::max(worst, e.max_abs);
  }
  return worst;
}

const ResidualSeries& ResidualReport::at(const std::string& name) const {
  for (const ResidualSeries& e : equations) {
    if (e.name == name) return e;
  }
  throw Error(ErrorCode::Usage, "no residual named '" + name + "'");
}

void ResidualReport::export_to(Report& report, const std::string& prefix) const {
  for (const ResidualSeries& e : equations) report.add(make_quantity(prefix + e.name, e.values.values, tolerance));
}

ResidualReport pa_system_residuals(const CurvatureProfile& curvatures, const ScalarSeries& f,
                                   const PADecomposition& decomp, double tolerance) {
  const Grid& g = decomp.grid();
  const auto coeffs = decomp.frame_coefficients();
  const std::size_t m = coeffs.size();
  if (curvatures.kappa.size() != m - 1) throw Error(ErrorCode::Input, "curvature profile and decomposition disagree on m");
  require_same_grid(f.grid, g, "potential function");
  for (const ScalarSeries& k : curvatures.kappa) require_same_grid(k.grid, g, "curvature");

  std::vector<std::vector<double>> d(m);
  for (std::size_t j = 0; j < m; ++j) d[j] = derivative_of(*coeffs[j]).values;

  ResidualReport report;
  report.tolerance = tolerance;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> r(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      // nabla_T V - f T + f lambda_0 V, component along X_{j+1}.
      double e = d[j][i] + f[i] * decomp.lambdas[0][i] * (*coeffs[j])[i];
      if (j == 0) e -= f[i];
      if (j > 0) e += (*coeffs[j - 1])[i] * curvatures.kappa[j - 1][i];
      if (j + 1 < m) e -= (*coeffs[j + 1])[i] * curvatures.kappa[j][i];
      r[i] = -e;
    }
    report.add("eq" + std::to_string(j + 1), ScalarSeries(g, std::move(r)));
  }
  return report;
}

// ---------------------------------------------------------------- theta = pi / 2

OrthogonalAnalysis orthogonal_angle_analysis(const CurvatureProfile& curvatures, const ScalarSeries& f,
                                             const PADecomposition& decomp, double tolerance) {
  if (decomp.dim() != 3 || curvatures.kappa.size() != 2) {
    throw Error(ErrorCode::Unsupported, "orthogonal-angle analysis needs a 3-dimensional curve");
  }
  const Grid& g = decomp.grid();
  require_same_grid(f.grid, g, "potential function");
  const double dev = max_abs_deviation(decomp.theta.values, std::numbers::pi / 2);
  if (dev > 1e-6) {
    throw Error(ErrorCode::Input, "theta is not pi/2 (max deviation " + std::to_string(dev) + ")");
  }
  if (max_abs(f.values) <= 1e-6) {
    throw Error(ErrorCode::ParallelCase, "potential function vanishes along the curve; the field is parallel");
  }

  const std::size_t mid = g.mid_index();
  const ScalarSeries& l0 = decomp.lambdas[0];
  const ScalarSeries& l1 = decomp.lambdas[1];
  if (!(std::abs(l0[mid]) < 1.0)) throw Error(ErrorCode::Domain, "|lambda_0| reaches 1 at the anchor", g[mid]);

  OrthogonalAnalysis out{cumulative_integral(f, g[mid], std::atanh(l0[mid])), std::atanh(l0[mid]),
                         l1[mid] < 0 ? -1 : 1, ScalarSeries::constant(g, 0.0), {}};
  std::vector<double> ratio(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) ratio[i] = curvatures.torsion()[i] / curvatures.curvature()[i];
  out.ratio = ScalarSeries(g, ratio);

  std::vector<double> e_l0(g.size()), e_l1(g.size()), e_ratio(g.size()), e_norm(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double p = out.p[i];
    e_l0[i] = l0[i] - std::tanh(p);
    e_l1[i] = std::abs(l1[i]) - 1.0 / std::cosh(p);
    e_ratio[i] = ratio[i] - out.branch * std::sinh(p);
    e_norm[i] = l0[i] * l0[i] + l1[i] * l1[i] - 1.0;
  }
  out.fit.tolerance = tolerance;
  out.fit.add("lambda0_vs_tanh_p", ScalarSeries(g, e_l0));
  out.fit.add("abs_lambda1_vs_sech_p", ScalarSeries(g, e_l1));
  out.fit.add("ratio_vs_sinh_p", ScalarSeries(g, e_ratio));
  out.fit.add("orthogonal_norm_identity", ScalarSeries(g, e_norm));
  return out;
}

// ---------------------------------------------------------------- explicit curvatures

CurvatureProfile curvatures_from_pa(const ScalarSeries& f, const PADecomposition& decomp, CurvatureMode mode) {
  if (decomp.dim() != 3) throw Error(ErrorCode::Unsupported, "explicit PA curvatures are defined for m = 3");
  const Grid& g = decomp.grid();
  require_same_grid(f.grid, g, "potential function");
  const std::vector<double>& c = decomp.cos_theta.values;
  const std::size_t weakest = argmin_abs(c);
  if (std::abs(c[weakest]) < kNearOrthogonal) {
    throw Error(ErrorCode::NearOrthogonal,
                "|cos theta| < 1e-4; use the orthogonal-angle analysis instead of the explicit formulas", g[weakest]);
  }
  const std::size_t n = g.size();
  std::vector<double> kappa(n);
  std::vector<double> tau(n);
  const ScalarSeries& l0 = decomp.lambdas[0];
  if (mode == CurvatureMode::Concircular) {
    if (max_abs(l0.values) > 1e-6) throw Error(ErrorCode::Input, "concircular mode needs lambda_0 = 0");
    const std::vector<double> dtheta = derivative_of(decomp.oriented_theta).values;
    for (std::size_t i = 0; i < n; ++i) {
      kappa[i] = -f[i] / c[i];
      tau[i] = -dtheta[i];
    }
  } else {
    const ScalarSeries& l1 = decomp.lambdas[1];
    const std::vector<double> dl0 = derivative_of(l0).values;
    const std::vector<double> dl1 = derivative_of(l1).values;
    for (std::size_t i = 0; i < n; ++i) {
      kappa[i] = (dl0[i] - f[i] * (1.0 - l0[i] * l0[i])) / c[i];
      tau[i] = -(f[i] * l0[i] * l1[i] + dl1[i]) / c[i];
    }
  }
  return CurvatureProfile{{ScalarSeries(g, kappa), ScalarSeries(g, tau)}};
}

ResidualReport geodesic_sphere_residual(const CurvatureProfile& profile, double tolerance) {
  if (profile.kappa.size() != 2) throw Error(ErrorCode::Unsupported, "the geodesic-sphere condition is for m = 3");
  const ScalarSeries& kappa = profile.curvature();
  const ScalarSeries& tau = profile.torsion();
  const Grid& g = kappa.grid;
  require_same_grid(tau.grid, g, "torsion");
  const std::size_t weakest = argmin_abs(tau.values);
  if (std::abs(tau[weakest]) < 1e-6) {
    throw Error(ErrorCode::TorsionVanishing, "torsion vanishes; the geodesic-sphere condition needs tau != 0",
                g[weakest]);
  }
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(kappa[i] > 0.0)) throw Error(ErrorCode::Domain, "curvature must be positive", g[i]);
  }
  const std::vector<double> dk = derivative_of(kappa).values;
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = -dk[i] / (kappa[i] * kappa[i]) / tau[i];
  const std::vector<double> dw = differentiate_series(ScalarSeries(g, w)).values;
  // Without an exact kappa' the residual differentiates differenced data twice;
  // the one-sided stencils at the ends then amplify rounding well past the
  // truncation error, so only nodes clear of them are reported.
  const std::size_t edge = kappa.has_exact_derivative() ? 0 : kTwiceDifferencedEdge;
  if (n < 2 * edge + Grid::kMinNodes) throw Error(ErrorCode::Size, "grid too short for the geodesic-sphere residual");
  std::vector<double> nodes, r;
  for (std::size_t i = edge; i + edge < n; ++i) {
    nodes.push_back(g[i]);
    r.push_back(dw[i] + tau[i] / kappa[i]);
  }
  ResidualReport out;
  out.tolerance = tolerance;
  out.add("geodesic_sphere", ScalarSeries(edge ? Grid(std::move(nodes)) : g, std::move(r)));
  return out;
}

SphereFit sphere_potential_fit(const ScalarSeries& f, const ScalarSeries& theta) {
  const Grid& g = f.grid;
  require_same_grid(theta.grid, g, "angle");
  const std::size_t n = g.size();
  std::vector<double> tan_t(n);
  std::vector<double> inv_f(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(std::abs(f[i]) > 1e-12)) throw Error(ErrorCode::Domain, "potential function vanishes", g[i]);
    if (std::abs(std::cos(theta[i])) < kNearOrthogonal) {
      throw Error(ErrorCode::NearOrthogonal, "|cos theta| < 1e-4 in the sphere fit", g[i]);
    }
    tan_t[i] = std::tan(theta[i]);
    inv_f[i] = 1.0 / f[i];
  }
  const std::vector<ScalarSeries> basis{ScalarSeries(g, tan_t), ScalarSeries::constant(g, 1.0)};
  const LinearFit fit = fit_linear_basis(basis, ScalarSeries(g, inv_f));
  return SphereFit{fit.coefficients[0], fit.coefficients[1], fit.rms};
}

LancretReport lancret_concircular_check(const ScalarSeries& f, const PADecomposition& decomp,
                                        const CurvatureProfile& profile, double tolerance) {
  if (decomp.dim() != 3 || profile.kappa.size() != 2) {
    throw Error(ErrorCode::Unsupported, "the Lancret check is for m = 3");
  }
  const Grid& g = decomp.grid();
  require_same_grid(f.grid, g, "potential function");
  if (max_abs(decomp.lambdas[0].values) > 1e-6) throw Error(ErrorCode::Input, "the Lancret check needs lambda_0 = 0");
  const std::size_t weakest = argmin_abs(decomp.cos_theta.values);
  if (std::abs(decomp.cos_theta[weakest]) < kNearOrthogonal) {
    throw Error(ErrorCode::NearOrthogonal, "|cos theta| < 1e-4 in the Lancret check", g[weakest]);
  }
  const std::size_t n = g.size();
  std::vector<double> ratio(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ratio[i] = profile.torsion()[i] / profile.curvature()[i];
    sum += ratio[i];
  }
  LancretReport out;
  out.r0 = sum / static_cast<double>(n);
  if (std::abs(out.r0) <= 1e-8) {
    throw Error(ErrorCode::Input, "tau/kappa vanishes; the Lancret form needs a nonzero constant ratio");
  }
  out.ratio_spread = max_abs_deviation(ratio, out.r0);
  out.lancret = out.ratio_spread <= tolerance;

  const std::size_t mid = g.mid_index();
  const ScalarSeries integral = cumulative_integral(f, g[mid], 0.0);
  out.r1 = std::sin(decomp.oriented_theta[mid]);
  std::vector<double> e_sin(n);
  std::vector<double> e_ratio(n);
  for (std::size_t i = 0; i < n; ++i) {
    e_sin[i] = std::sin(decomp.oriented_theta[i]) - (out.r0 * integral[i] + out.r1);
    e_ratio[i] = ratio[i] - out.r0;
  }
  out.residuals.tolerance = tolerance;
  out.residuals.add("ratio_constancy", ScalarSeries(g, e_ratio));
  out.residuals.add("sin_theta_vs_integral", ScalarSeries(g, e_sin));

  const double f0 = f[mid];
  if (max_abs_deviation(f.values, f0) <= 1e-12 * std::max(1.0, std::abs(f0))) {
    std::vector<double> e_kappa;
    std::vector<double> nodes;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = out.r0 * f0 * (g[i] - g[mid]) + out.r1;
      if (std::abs(u) > 0.9) continue;
      e_kappa.push_back(std::abs(profile.curvature()[i]) - std::abs(f0) / std::sqrt(1.0 - u * u));
      nodes.push_back(g[i]);
    }
    out.closed_form_nodes = nodes.size();
    if (nodes.size() >= Grid::kMinNodes) out.residuals.add("kappa_constant_f_closed_form", ScalarSeries(Grid(nodes), e_kappa));
  }
  return out;
}

// ---------------------------------------------------------------- surfaces

SurfaceCurvature surface_pa_curvature(const ScalarSeries& f, const PADecomposition& decomp) {
  if (decomp.dim() != 2) throw Error(ErrorCode::Unsupported, "the surface relation is for m = 2");
  const Grid& g = decomp.grid();
  require_same_grid(f.grid, g, "potential function");
  if (max_abs(decomp.cos_theta.values) < kNearOrthogonal) {
    throw Error(ErrorCode::NearOrthogonal, "cos theta vanishes identically; the curvature is not determined");
  }
  const std::vector<double> dtheta = derivative_of(decomp.oriented_theta).values;
  std::vector<double> kappa(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) kappa[i] = dtheta[i] - decomp.cos_theta[i] * f[i];
  return SurfaceCurvature{ScalarSeries(g, std::move(kappa))};
}

GrimReaperCheck grim_reaper_check(const ScalarSeries& kappa, const ScalarSeries& f, const PADecomposition& decomp,
                                  double tolerance) {
  const Grid& g = decomp.grid();
  require_same_grid(kappa.grid, g, "curvature");
  require_same_grid(f.grid, g, "potential function");
  const std::size_t mid = g.mid_index();
  const ScalarSeries integral = cumulative_integral(f, g[mid], 0.0);
  GrimReaperCheck out;
  out.constant = std::asinh(std::tan(decomp.oriented_theta[mid])) - (g[mid] + integral[mid]);
  std::vector<double> e_sech(g.size());
  std::vector<double> e_cos(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    e_sech[i] = kappa[i] - 1.0 / std::cosh(g[i] + integral[i] + out.constant);
    e_cos[i] = kappa[i] - decomp.cos_theta[i];
  }
  out.residuals.tolerance = tolerance;
  out.residuals.add("kappa_vs_sech", ScalarSeries(g, e_sech));
  out.residuals.add("kappa_vs_cos_theta", ScalarSeries(g, e_cos));
  return out;
}

ScalarSeries halfplane_curvature(const ArcLengthCurve& curve) {
  if (curve.model.kind() != ModelKind::HyperbolicHalfSpace || curve.model.dim() != 2) {
    throw Error(ErrorCode::Unsupported, "half-plane curvature needs the 2-dimensional half-space model");
  }
  const Grid& g = curve.grid;
  const VectorSeries accel = differentiate_series(VectorSeries(g, curve.velocity));
  std::vector<double> kappa(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double y = curve.points[i][1];
    if (!(y > ManifoldModel::kHalfSpaceGuard)) throw Error(ErrorCode::Domain, "curve reaches the boundary", g[i]);
    const Vec& v = curve.velocity[i];
    const Vec& a = accel.values[i];
    const double speed = v.norm();
    const double kappa_e = (v[0] * a[1] - v[1] * a[0]) / (speed * speed * speed);
    // Euclidean normal J v / |v| paired with d/dy.
    kappa[i] = y * kappa_e + v[0] / speed;
  }
  return ScalarSeries(g, std::move(kappa));
}

// ---------------------------------------------------------------- full analysis

namespace {

std::vector<double> series_difference(const ScalarSeries& a, const ScalarSeries& b) {
  return difference(a.values, b.values);
}

void analyze_3d(Analysis& out, double tolerance) {
  const PADecomposition& decomp = *out.decomposition;
  const LawEstimate& law = *out.law;
  const CurvatureProfile& frenet_k = out.frenet.curvatures;
  Report& report = out.report;
  const std::vector<double>& c = decomp.cos_theta.values;

  if (std::abs(c[argmin_abs(c)]) >= kNearOrthogonal) {
    const CurvatureProfile general = curvatures_from_pa(law.law.f, decomp, CurvatureMode::General3d);
    report.add(make_quantity("kappa_from_pa", series_difference(general.curvature(), frenet_k.curvature()), tolerance));
    report.add(make_quantity("tau_from_pa", series_difference(general.torsion(), frenet_k.torsion()), tolerance));
    if (max_abs(decomp.lambdas[0].values) <= 1e-6) {
      const CurvatureProfile conc = curvatures_from_pa(law.law.f, decomp, CurvatureMode::Concircular);
      report.add(make_quantity("kappa_concircular", series_difference(conc.curvature(), frenet_k.curvature()), tolerance));
      report.add(make_quantity("tau_concircular", series_difference(conc.torsion(), frenet_k.torsion()), tolerance));
      const ScalarSeries& f = law.law.f;
      const bool constant_f = max_abs_deviation(f.values, f[f.grid.mid_index()]) <= 1e-6;
      const bool twisted = std::abs(frenet_k.torsion()[argmin_abs(frenet_k.torsion().values)]) >= 1e-6;
      if (constant_f && twisted) {
        geodesic_sphere_residual(frenet_k, tolerance).export_to(report, "");
      }
      if (twisted) {
        const LancretReport lr = lancret_concircular_check(f, decomp, frenet_k, std::max(tolerance, 1e-5));
        if (lr.lancret) {
          lr.residuals.export_to(report, "lancret_");
          report.notes.push_back("Lancret: r0 = " + std::to_string(lr.r0) + ", r1 = " + std::to_string(lr.r1));
        } else {
          report.notes.push_back("tau/kappa is not constant; not a Lancret curve");
        }
      }
    }
  } else if (max_abs_deviation(decomp.theta.values, std::numbers::pi / 2) <= 1e-6 &&
             max_abs(law.law.f.values) > 1e-6) {
    const OrthogonalAnalysis oa = orthogonal_angle_analysis(frenet_k, law.law.f, decomp, std::max(tolerance, 1e-5));
    oa.fit.export_to(report, "orthogonal_");
    report.notes.push_back("orthogonal angle: branch " + std::to_string(oa.branch) + ", p(anchor) = " +
                           std::to_string(oa.r));
  } else {
    report.notes.push_back("cos theta approaches 0 without theta = pi/2; explicit curvature formulas skipped");
  }
}

void analyze_2d(const ArcLengthCurve& curve, Analysis& out, double tolerance) {
  const PADecomposition& decomp = *out.decomposition;
  const ScalarSeries& f = out.law->law.f;
  const ScalarSeries& kappa = out.frenet.curvatures.curvature();
  Report& report = out.report;
  if (max_abs(decomp.cos_theta.values) >= kNearOrthogonal) {
    const SurfaceCurvature sc = surface_pa_curvature(f, decomp);
    report.add(make_quantity("kappa_from_surface_relation", series_difference(sc.kappa, kappa), tolerance));
    if (max_abs(series_difference(kappa, decomp.cos_theta)) <= tolerance) {
      grim_reaper_check(kappa, f, decomp, tolerance).residuals.export_to(report, "grim_reaper_");
    }
  }
  if (curve.model.kind() == ModelKind::HyperbolicHalfSpace) {
    report.add(make_quantity("kappa_halfplane_relation", series_difference(halfplane_curvature(curve), kappa), tolerance));
  }
}

}  // namespace

Analysis analyze(const ArcLengthCurve& curve, const std::optional<FieldAlongCurve>& field, double tolerance) {
  Analysis out{frenet_apparatus(curve), std::nullopt, std::nullopt, {}};
  out.report.add(make_scalar_quantity("frenet_residual", frenet_residual(curve, out.frenet), tolerance));
  const int m = curve.model.dim();
  if (m == 2 && curve.model.kind() == ModelKind::HyperbolicHalfSpace && !field) {
    out.report.add(make_quantity("kappa_halfplane_relation",
                                 series_difference(halfplane_curvature(curve), out.frenet.curvatures.curvature()),
                                 tolerance));
  }
  if (!field) return out;

  out.decomposition = decompose(curve, out.frenet, *field);
  out.law = estimate_law(curve, *field);
  const LawEstimate& law = *out.law;
  out.report.add(make_scalar_quantity("law_residual", law.max_residual, 1e-6));
  out.report.add(make_scalar_quantity("pa_norm_identity", out.decomposition->norm_defect(), 2 * kUnitFieldTolerance));
  out.report.notes.push_back(std::string("field class: ") + to_string(law.law.cls));
  if (!law.note.empty()) out.report.notes.push_back(law.note);
  pa_system_residuals(out.frenet.curvatures, law.law.f, *out.decomposition, tolerance).export_to(out.report, "system_");

  if (m == 3) analyze_3d(out, tolerance);
  if (m == 2) analyze_2d(curve, out, tolerance);
  return out;
}

}  // namespace pacurves
