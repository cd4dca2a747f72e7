#include "pacurves/property_suite.hpp"

#include "pacurves/curve.hpp"
#include "pacurves/manifold.hpp"
#include "pacurves/pa_synthesis.hpp"
#include "pacurves/transport.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace pacurves {

namespace {

const char* const kModels[] = {"euclidean:2", "euclidean:3", "sphere:3:1.5", "sphere:2:1",
                               "halfspace:3", "hyperboloid:3:1", "warped:3:exp(t)", "warped:3:cosh(t)"};

struct Instance {
  ArcLengthCurve curve;
  ScalarSeries f;
  Vec v0;
};

// a + b sin(c s + d) with |b| < a / 2.
ScalarSeries random_wave(const Grid& grid, std::mt19937_64& rng, double lo, double hi, bool random_sign) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double a = lo + (hi - lo) * u(rng);
  if (random_sign && u(rng) < 0.5) a = -a;
  const double b = 0.5 * std::abs(a) * u(rng);
  const double c = 0.5 + 2.5 * u(rng);
  const double d = 6.283185307179586 * u(rng);
  std::vector<double> v(grid.size()), dv(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    v[i] = a + b * std::sin(c * grid[i] + d);
    dv[i] = b * c * std::cos(c * grid[i] + d);
  }
  return ScalarSeries(grid, std::move(v), std::move(dv));
}

Instance draw(std::mt19937_64& rng, int k) {
  const ManifoldModel model = ManifoldModel::parse(kModels[k % std::size(kModels)]);
  const Grid grid = Grid::uniform(0.0, 1.5, 1e-3);
  CurvatureProfile profile;
  profile.kappa.push_back(random_wave(grid, rng, 0.4, 1.5, false));
  for (int j = 2; j < model.dim(); ++j) profile.kappa.push_back(random_wave(grid, rng, 0.2, 1.0, true));
  const Vec p0 = default_point(model);
  const std::vector<Vec> frame0 = model.canonical_frame(p0);
  SynthesizedCurve syn = frenet_synthesize(model, profile, p0, frame0, grid);

  // Unit initial field at a definite angle from the tangent.
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double angle = 0.4 + 2.3 * u(rng);
  Vec other = Vec::Zero(model.coord_dim());
  for (std::size_t j = 1; j < syn.frenet.frame.size(); ++j) {
    other += (u(rng) - 0.5) * syn.frenet.frame[j].vectors.front();
  }
  other /= model.norm(p0, other);
  const Vec v0 = std::cos(angle) * syn.frenet.tangent().vectors.front() + std::sin(angle) * other;
  ScalarSeries f = random_wave(grid, rng, 0.3, 1.0, true);
  return Instance{std::move(syn.curve), std::move(f), v0};
}

}  // namespace

Report transport_property_suite(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<double> norm_defect, parallel_residual, parallel_f, nonparallel_flag, f_rms, omega_rms;
  for (int k = 0; k < count; ++k) {
    const Instance inst = draw(rng, k);
    const ArcLengthCurve& c = inst.curve;
    const Grid& g = c.grid;

    const TorseFormingLaw law{inst.f, ScalarSeries::constant(g, 0.0), TorseClass::AntiTorqued};
    const FieldAlongCurve v = transport_field(c, law, inst.v0);
    double defect = 0.0;
    std::vector<double> tv(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      defect = std::max(defect, std::abs(c.model.norm(c.points[i], v.vectors[i]) - 1.0));
      tv[i] = c.model.inner(c.points[i], v.vectors[i], c.velocity[i]);
    }
    norm_defect.push_back(defect);

    // Recovery against the law actually imposed: omega(T) = -f <V, T>.
    const LawEstimate est = estimate_law(c, v);
    double sf = 0.0, so = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!est.used[i]) continue;
      sf += std::pow(est.law.f[i] - inst.f[i], 2);
      so += std::pow(est.law.omega_t[i] + inst.f[i] * tv[i], 2);
      ++used;
    }
    f_rms.push_back(used ? std::sqrt(sf / used) : INFINITY);
    omega_rms.push_back(used ? std::sqrt(so / used) : INFINITY);
    nonparallel_flag.push_back(est.law.cls == TorseClass::Parallel ? 1.0 : 0.0);

    const TorseFormingLaw zero{ScalarSeries::constant(g, 0.0), ScalarSeries::constant(g, 0.0), TorseClass::Parallel};
    const FieldAlongCurve w = transport_field(c, zero, inst.v0);
    const FieldAlongCurve dw = covariant_derivative_along(c, w);
    double res = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) res = std::max(res, c.model.norm(c.points[i], dw.vectors[i]));
    parallel_residual.push_back(res);
    const LawEstimate pest = estimate_law(c, w);
    double fmax = max_abs(pest.law.f.values);
    if (pest.law.cls != TorseClass::Parallel) fmax = std::max(fmax, 1.0);
    parallel_f.push_back(fmax);
  }

  Report report;
  report.subject = {{"suite", "transport"}, {"seed", std::to_string(seed)}, {"count", std::to_string(count)}};
  report.add(make_quantity("unit_norm_preserved", norm_defect, 1e-8));
  report.add(make_quantity("zero_potential_gives_parallel", parallel_residual, 1e-8));
  report.add(make_quantity("parallel_gives_zero_potential", parallel_f, 1e-6));
  report.add(make_quantity("nonzero_potential_not_parallel", nonparallel_flag, 0.0));
  report.add(make_quantity("law_recovery_f_rms", f_rms, 1e-5));
  report.add(make_quantity("law_recovery_omega_rms", omega_rms, 1e-5));
  return report;
}

}  // namespace pacurves
