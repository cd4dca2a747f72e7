#include "pacurves/curve.hpp"

#include "pacurves/error.hpp"

#include <algorithm>
#include <cmath>

namespace pacurves {

namespace {

// Cubic Hermite interpolation on [a, b].
Vec hermite(double a, double b, const Vec& pa, const Vec& pb, const Vec& va, const Vec& vb, double t) {
  const double h = b - a;
  const double u = (t - a) / h;
  const double u2 = u * u;
  const double u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * pa + (u3 - 2 * u2 + u) * h * va + (-2 * u3 + 3 * u2) * pb + (u3 - u2) * h * vb;
}

}  // namespace

ArcLengthCurve ArcLengthCurve::from_samples(ManifoldModel model, Grid grid, std::vector<Vec> points,
                                           std::vector<Vec> velocity) {
  if (points.size() != grid.size() || velocity.size() != grid.size()) {
    throw Error(ErrorCode::Input, "curve samples do not match the grid");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    model.check_point(points[i]);
    if (velocity[i].size() != model.coord_dim()) throw Error(ErrorCode::Input, "velocity has wrong size");
    if (model.embedded() &&
        std::abs(model.ambient_inner(velocity[i], points[i])) > ManifoldModel::kEmbeddingTolerance * model.radius()) {
      throw Error(ErrorCode::Domain, "velocity is not tangent to the model", grid[i]);
    }
    if (std::abs(model.norm(points[i], velocity[i]) - 1.0) > kSpeedTolerance) {
      throw Error(ErrorCode::Input, "curve is not unit speed", grid[i]);
    }
  }
  return ArcLengthCurve{std::move(model), std::move(grid), std::move(points), std::move(velocity)};
}

double ArcLengthCurve::max_speed_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    worst = std::max(worst, std::abs(model.norm(points[i], velocity[i]) - 1.0));
  }
  return worst;
}

ArcLengthCurve arclength_reparametrize(const ManifoldModel& model, const Grid& raw_parameter,
                                       const std::vector<Vec>& raw_points) {
  if (raw_points.size() != raw_parameter.size()) throw Error(ErrorCode::Input, "raw curve does not match its grid");
  for (const Vec& p : raw_points) model.check_point(p);
  const std::size_t n = raw_parameter.size();

  VectorSeries raw_velocity = differentiate_series(VectorSeries(raw_parameter, raw_points));
  std::vector<double> speed(n);
  for (std::size_t i = 0; i < n; ++i) {
    raw_velocity.values[i] = model.tangent_part(raw_points[i], raw_velocity.values[i]);
    speed[i] = model.norm(raw_points[i], raw_velocity.values[i]);
    if (!(speed[i] > 1e-9)) throw Error(ErrorCode::Regularity, "raw speed vanishes", raw_parameter[i]);
  }
  const ScalarSeries speed_series(raw_parameter, speed);
  const ScalarSeries length = cumulative_integral(speed_series, raw_parameter.front(), raw_parameter.front());

  const double s0 = length.values.front();
  const double total = length.values.back() - s0;
  std::vector<double> s_nodes(n);
  for (std::size_t j = 0; j < n; ++j) s_nodes[j] = s0 + total * static_cast<double>(j) / static_cast<double>(n - 1);
  s_nodes.back() = s0 + total;
  Grid grid(std::move(s_nodes));

  std::vector<Vec> points(n);
  std::vector<Vec> velocity(n);
  std::size_t k = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double target = grid[j];
    while (k + 2 < n && length.values[k + 1] < target) ++k;
    // Newton on the cubic interpolant of s(t), safeguarded by the bracket.
    double lo = raw_parameter[k];
    double hi = raw_parameter[k + 1];
    double t = lo + (hi - lo) * (target - length.values[k]) / (length.values[k + 1] - length.values[k]);
    for (int it = 0; it < 50; ++it) {
      const double f = interpolate(length, t) - target;
      const double df = interpolate(speed_series, t);
      if (f > 0.0) hi = t; else lo = t;
      double next = t - f / df;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - t) < 1e-15 * std::max(1.0, std::abs(t))) {
        t = next;
        break;
      }
      t = next;
    }
    t = std::clamp(t, raw_parameter.front(), raw_parameter.back());
    const std::size_t iv = raw_parameter.interval(t);
    Vec p = hermite(raw_parameter[iv], raw_parameter[iv + 1], raw_points[iv], raw_points[iv + 1],
                    raw_velocity.values[iv], raw_velocity.values[iv + 1], t);
    p = model.retract(p);
    Vec v = model.tangent_part(p, interpolate(raw_velocity, t));
    v /= model.norm(p, v);
    points[j] = std::move(p);
    velocity[j] = std::move(v);
  }
  return ArcLengthCurve::from_samples(model, std::move(grid), std::move(points), std::move(velocity));
}

FrenetData frenet_apparatus(const ArcLengthCurve& curve) {
  const ManifoldModel& model = curve.model;
  const int m = model.dim();
  const std::size_t n = curve.grid.size();

  FrenetData out;
  std::vector<Vec> tangent(n);
  for (std::size_t i = 0; i < n; ++i) tangent[i] = curve.velocity[i] / model.norm(curve.points[i], curve.velocity[i]);
  out.frame.push_back(FieldAlongCurve{curve.grid, std::move(tangent)});

  for (int k = 1; k <= m - 1; ++k) {
    const FieldAlongCurve d = covariant_derivative_along(curve, out.frame.back());
    std::vector<Vec> next(n);
    std::vector<double> kappa(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec& p = curve.points[i];
      if (k <= m - 2) {
        Vec w = d.vectors[i];
        for (const FieldAlongCurve& x : out.frame) w -= model.inner(p, w, x.vectors[i]) * x.vectors[i];
        const double pivot = model.norm(p, w);
        if (pivot < kFrenetPivotTolerance) {
          throw Error(ErrorCode::DegenerateCurve,
                      "covariant derivatives of the velocity are dependent (curvature " + std::to_string(k) +
                          " vanishes)",
                      curve.grid[i]);
        }
        next[i] = w / pivot;
        kappa[i] = pivot;
      } else {
        std::vector<Vec> partial;
        partial.reserve(static_cast<std::size_t>(m - 1));
        for (const FieldAlongCurve& x : out.frame) partial.push_back(x.vectors[i]);
        next[i] = model.complete_frame(p, partial);
        kappa[i] = model.inner(p, d.vectors[i], next[i]);
      }
    }
    out.frame.push_back(FieldAlongCurve{curve.grid, std::move(next)});
    out.curvatures.kappa.emplace_back(curve.grid, std::move(kappa));
  }
  return out;
}

double frenet_residual(const ArcLengthCurve& curve, const FrenetData& frenet) {
  const ManifoldModel& model = curve.model;
  const std::size_t m = frenet.frame.size();
  double worst = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const FieldAlongCurve d = covariant_derivative_along(curve, frenet.frame[j]);
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
      Vec expected = Vec::Zero(d.vectors[i].size());
      if (j > 0) expected -= frenet.curvatures.kappa[j - 1][i] * frenet.frame[j - 1].vectors[i];
      if (j + 1 < m) expected += frenet.curvatures.kappa[j][i] * frenet.frame[j + 1].vectors[i];
      worst = std::max(worst, model.norm(curve.points[i], d.vectors[i] - expected));
    }
  }
  return worst;
}

SynthesizedCurve frenet_synthesize(const ManifoldModel& model, const CurvatureProfile& profile, const Vec& p0,
                                   std::span<const Vec> frame0, const Grid& grid, std::optional<double> anchor_s) {
  const int m = model.dim();
  const int k = model.coord_dim();
  if (static_cast<int>(profile.kappa.size()) != m - 1) throw Error(ErrorCode::Input, "profile needs m-1 curvatures");
  if (static_cast<int>(frame0.size()) != m) throw Error(ErrorCode::Input, "initial frame needs m vectors");
  for (const ScalarSeries& kappa : profile.kappa) {
    if (!(kappa.grid == grid)) throw Error(ErrorCode::Input, "curvature profile is not sampled on the synthesis grid");
  }
  model.check_point(p0);
  if (model.gram_defect(p0, frame0) > 1e-8) throw Error(ErrorCode::Input, "initial frame is not orthonormal");
  if (!(model.orientation(p0, frame0) > 0.0)) throw Error(ErrorCode::Input, "initial frame is negatively oriented");
  for (int j = 0; j + 1 < m - 1; ++j) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!(profile.kappa[static_cast<std::size_t>(j)][i] > 0.0)) {
        throw Error(ErrorCode::Input, "curvature " + std::to_string(j + 1) + " must be positive", grid[i]);
      }
    }
  }

  auto block = [k](Vec& y, int j) { return y.segment(static_cast<Eigen::Index>(j) * k, k); };
  auto cblock = [k](const Vec& y, int j) { return y.segment(static_cast<Eigen::Index>(j) * k, k); };

  Vec y0(static_cast<Eigen::Index>(k) * (m + 1));
  block(y0, 0) = p0;
  const std::vector<Vec> start = model.orthonormalize(p0, frame0);
  for (int j = 0; j < m; ++j) block(y0, j + 1) = start[static_cast<std::size_t>(j)];

  const OdeRhs rhs = [&](double s, const Vec& y) {
    std::vector<double> kappa(static_cast<std::size_t>(m - 1));
    for (int j = 0; j < m - 1; ++j) kappa[static_cast<std::size_t>(j)] = interpolate(profile.kappa[static_cast<std::size_t>(j)], s);
    const Vec p = cblock(y, 0);
    const Vec t = cblock(y, 1);
    Vec dy(y.size());
    block(dy, 0) = t;
    for (int j = 0; j < m; ++j) {
      Vec d = -model.christoffel(p, t, cblock(y, j + 1));
      if (j > 0) d -= kappa[static_cast<std::size_t>(j - 1)] * cblock(y, j);
      if (j + 1 < m) d += kappa[static_cast<std::size_t>(j)] * cblock(y, j + 2);
      block(dy, j + 1) = d;
    }
    return dy;
  };

  double max_gram = 0.0;
  double max_drift = 0.0;
  const StepHook correct = [&](double s, Vec& y) {
    Vec p = block(y, 0);
    const double drift = model.constraint_defect(p);
    max_drift = std::max(max_drift, drift);
    if (drift > 1e-6) throw Error(ErrorCode::Integration, "embedded constraint drifted beyond 1e-6", s);
    p = model.retract(p);
    if (model.kind() == ModelKind::HyperbolicHalfSpace && !(p[m - 1] > ManifoldModel::kHalfSpaceGuard)) {
      throw Error(ErrorCode::Domain, "synthesized curve left the half-space", s);
    }
    std::vector<Vec> frame(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) frame[static_cast<std::size_t>(j)] = block(y, j + 1);
    max_gram = std::max(max_gram, model.gram_defect(p, frame));
    frame = model.orthonormalize(p, frame);
    block(y, 0) = p;
    for (int j = 0; j < m; ++j) block(y, j + 1) = frame[static_cast<std::size_t>(j)];
  };

  const std::size_t anchor = anchor_s ? grid.index_of(*anchor_s) : 0;
  const VectorSeries states = integrate_ivp_from(rhs, y0, grid, anchor, correct);

  const std::size_t n = grid.size();
  std::vector<Vec> points(n);
  std::vector<std::vector<Vec>> frames(static_cast<std::size_t>(m), std::vector<Vec>(n));
  for (std::size_t i = 0; i < n; ++i) {
    points[i] = cblock(states.values[i], 0);
    for (int j = 0; j < m; ++j) frames[static_cast<std::size_t>(j)][i] = cblock(states.values[i], j + 1);
  }
  std::vector<Vec> velocity = frames[0];

  SynthesizedCurve out{ArcLengthCurve::from_samples(model, grid, std::move(points), std::move(velocity)), {}, max_gram,
                       max_drift};
  for (auto& f : frames) out.frenet.frame.push_back(FieldAlongCurve{grid, std::move(f)});
  out.frenet.curvatures = profile;
  return out;
}

}  // namespace pacurves
