#include "pacurves/transport.hpp"

#include "pacurves/error.hpp"

#include <algorithm>
#include <cmath>

namespace pacurves {

const char* to_string(TorseClass cls) {
  switch (cls) {
    case TorseClass::Generic: return "generic";
    case TorseClass::Concircular: return "concircular";
    case TorseClass::Torqued: return "torqued";
    case TorseClass::AntiTorqued: return "anti-torqued";
    case TorseClass::Parallel: return "parallel";
  }
  return "generic";
}

TorseClass parse_torse_class(const std::string& name) {
  for (TorseClass c : {TorseClass::Generic, TorseClass::Concircular, TorseClass::Torqued, TorseClass::AntiTorqued,
                       TorseClass::Parallel}) {
    if (name == to_string(c)) return c;
  }
  throw Error(ErrorCode::Usage, "unknown field class '" + name + "'");
}

BuiltinKind parse_builtin_kind(const std::string& name) {
  if (name == "parallel") return BuiltinKind::Parallel;
  if (name == "concircular") return BuiltinKind::Concircular;
  if (name == "torqued") return BuiltinKind::Torqued;
  if (name == "anti-torqued") return BuiltinKind::AntiTorqued;
  throw Error(ErrorCode::Usage, "unknown builtin field '" + name + "'");
}

FieldAlongCurve transport_field(const ArcLengthCurve& curve, const TorseFormingLaw& law, const Vec& v0,
                                std::optional<double> anchor_s) {
  const ManifoldModel& model = curve.model;
  if (!(law.f.grid == curve.grid) || !(law.omega_t.grid == curve.grid)) {
    throw Error(ErrorCode::Input, "law is not sampled on the curve grid");
  }
  if (v0.size() != model.coord_dim()) throw Error(ErrorCode::Input, "initial vector has wrong size");
  const std::size_t anchor = anchor_s ? curve.grid.index_of(*anchor_s) : 0;
  Vec start = v0;
  if (model.embedded()) {
    const Vec& p0 = curve.points[anchor];
    if (std::abs(model.ambient_inner(v0, p0)) > 1e-8 * model.radius() * std::max(1.0, v0.norm())) {
      throw Error(ErrorCode::Input, "initial vector is not tangent at the anchor point");
    }
    start = model.tangent_part(p0, v0);
  }

  const VectorSeries points(curve.grid, curve.points);
  const VectorSeries velocity(curve.grid, curve.velocity);
  const bool coupled = law.cls == TorseClass::AntiTorqued;

  const OdeRhs rhs = [&](double s, const Vec& v) {
    const Vec p = interpolate(points, s);
    const Vec t = interpolate(velocity, s);
    const double f = interpolate(law.f, s);
    const double omega = coupled ? -f * model.inner(p, v, t) : interpolate(law.omega_t, s);
    return Vec(f * t + omega * v - model.christoffel(p, t, v));
  };

  StepHook project;
  if (model.embedded()) {
    project = [&](double s, Vec& v) { v = model.tangent_part(curve.points[curve.grid.nearest(s)], v); };
  }
  const VectorSeries out = integrate_ivp_from(rhs, start, curve.grid, anchor, project);
  return FieldAlongCurve{curve.grid, out.values};
}

LawEstimate estimate_law(const ArcLengthCurve& curve, const FieldAlongCurve& field, const LawThresholds& thresholds) {
  const ManifoldModel& model = curve.model;
  const FieldAlongCurve d = covariant_derivative_along(curve, field);
  const std::size_t n = curve.grid.size();

  std::vector<double> f(n, 0.0);
  std::vector<double> omega(n, 0.0);
  std::vector<double> residual;
  std::vector<bool> used(n, false);
  const double min_sin = std::sin(thresholds.min_angle);

  for (std::size_t i = 0; i < n; ++i) {
    const Vec& p = curve.points[i];
    const Vec& t = curve.velocity[i];
    const Vec& v = field.vectors[i];
    const double tt = model.inner(p, t, t);
    const double tv = model.inner(p, t, v);
    const double vv = model.inner(p, v, v);
    if (!(vv > 1e-24)) throw Error(ErrorCode::Domain, "field vanishes along the curve", curve.grid[i]);
    const double det = tt * vv - tv * tv;
    if (det < min_sin * min_sin * tt * vv) continue;
    const double dt = model.inner(p, d.vectors[i], t);
    const double dv = model.inner(p, d.vectors[i], v);
    f[i] = (vv * dt - tv * dv) / det;
    omega[i] = (tt * dv - tv * dt) / det;
    used[i] = true;
    residual.push_back(model.norm(p, d.vectors[i] - f[i] * t - omega[i] * v));
  }
  if (residual.empty()) {
    throw Error(ErrorCode::DegenerateFit, "field is parallel to the tangent at every node");
  }

  // Skipped nodes take values interpolated linearly from the nearest used neighbours.
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) kept.push_back(i);
  }
  for (std::size_t i = 0, next = 0; i < n; ++i) {
    if (used[i]) {
      ++next;
      continue;
    }
    if (next == 0) {
      f[i] = f[kept.front()];
      omega[i] = omega[kept.front()];
    } else if (next == kept.size()) {
      f[i] = f[kept.back()];
      omega[i] = omega[kept.back()];
    } else {
      const std::size_t a = kept[next - 1];
      const std::size_t b = kept[next];
      const double w = (curve.grid[i] - curve.grid[a]) / (curve.grid[b] - curve.grid[a]);
      f[i] = (1 - w) * f[a] + w * f[b];
      omega[i] = (1 - w) * omega[a] + w * omega[b];
    }
  }

  double max_f = 0.0;
  double max_omega = 0.0;
  double max_anti = 0.0;
  for (std::size_t i : kept) {
    const Vec& p = curve.points[i];
    max_f = std::max(max_f, std::abs(f[i]));
    max_omega = std::max(max_omega, std::abs(omega[i]));
    max_anti = std::max(max_anti, std::abs(omega[i] + f[i] * model.inner(p, field.vectors[i], curve.velocity[i])));
  }

  LawEstimate out{TorseFormingLaw{ScalarSeries(curve.grid, f), ScalarSeries(curve.grid, omega), TorseClass::Generic},
                  rms(residual), max_abs(residual), used, ""};
  if (out.max_residual > thresholds.max_residual) {
    out.note = "field is not torse-forming along the curve; f and omega(T) are least-squares values";
  } else if (std::max(max_f, max_omega) <= thresholds.zero) {
    out.law.cls = TorseClass::Parallel;
  } else if (max_omega <= thresholds.zero) {
    out.law.cls = TorseClass::Concircular;
  } else if (max_anti <= thresholds.zero) {
    out.law.cls = TorseClass::AntiTorqued;
  } else {
    out.note = "torqued and generic fields are indistinguishable from omega(T) along a single curve";
  }
  const std::size_t skipped = n - kept.size();
  if (skipped > 0) {
    if (!out.note.empty()) out.note += "; ";
    out.note += std::to_string(skipped) + " node(s) with V nearly parallel to T were skipped";
  }
  return out;
}

BuiltinField builtin_field(const ManifoldModel& model, BuiltinKind kind, const std::vector<double>& params) {
  const int m = model.dim();
  const int k = model.coord_dim();
  auto unsupported = [&]() -> BuiltinField {
    throw Error(ErrorCode::Unsupported, "builtin field not available on model " + model.spec());
  };
  auto vector_param = [&](int size, Vec fallback) {
    if (params.empty()) return fallback;
    if (static_cast<int>(params.size()) != size) {
      throw Error(ErrorCode::Usage, "builtin field expects " + std::to_string(size) + " parameters");
    }
    return Vec(Eigen::Map<const Vec>(params.data(), size));
  };

  switch (model.kind()) {
    case ModelKind::Euclidean:
      if (kind == BuiltinKind::Parallel) {
        const Vec v = vector_param(m, Vec::Unit(m, m - 1));
        return {"constant vector", TorseClass::Parallel, [v](const Vec&) { return v; },
                [](const Vec&) { return 0.0; }, [](const Vec&, const Vec&) { return 0.0; }};
      }
      if (kind == BuiltinKind::Concircular) {
        const double r = params.empty() ? 1.0 : params.at(0);
        if (r == 0.0) throw Error(ErrorCode::Usage, "concircular factor r must be nonzero");
        return {"r * position", TorseClass::Concircular, [r](const Vec& p) { return Vec(r * p); },
                [r](const Vec&) { return r; }, [](const Vec&, const Vec&) { return 0.0; }};
      }
      if (kind == BuiltinKind::AntiTorqued) {
        auto check = [](const Vec& p) {
          if (!(p.norm() > 0.0)) throw Error(ErrorCode::Domain, "position field is undefined at the origin");
        };
        return {"position / |position|", TorseClass::AntiTorqued,
                [check](const Vec& p) {
                  check(p);
                  return Vec(p / p.norm());
                },
                [check](const Vec& p) {
                  check(p);
                  return 1.0 / p.norm();
                },
                [](const Vec& p, const Vec& t) { return -p.dot(t) / p.squaredNorm(); }};
      }
      return unsupported();

    case ModelKind::Sphere:
    case ModelKind::HyperbolicHyperboloid: {
      if (kind != BuiltinKind::Concircular) return unsupported();
      const Vec v = vector_param(k, Vec::Unit(k, k - 1));
      const ManifoldModel mdl = model;
      const double c2 = model.radius() * model.radius();
      const double sign = model.kind() == ModelKind::Sphere ? -1.0 : 1.0;
      return {"tangential part of a constant vector", TorseClass::Concircular,
              [mdl, v](const Vec& p) { return mdl.tangent_part(p, v); },
              [mdl, v, c2, sign](const Vec& p) { return sign * mdl.ambient_inner(v, p) / c2; },
              [](const Vec&, const Vec&) { return 0.0; }};
    }

    case ModelKind::HyperbolicHalfSpace: {
      if (kind != BuiltinKind::AntiTorqued) return unsupported();
      const int last = m - 1;
      return {"-x_m d/dx_m", TorseClass::AntiTorqued,
              [last, m](const Vec& p) { return Vec(-p[last] * Vec::Unit(m, last)); },
              [](const Vec&) { return 1.0; }, [last](const Vec& p, const Vec& t) { return t[last] / p[last]; }};
    }

    case ModelKind::WarpedProduct: {
      const ManifoldModel mdl = model;
      if (kind == BuiltinKind::Concircular) {
        return {"rho d/dt", TorseClass::Concircular,
                [mdl, m](const Vec& p) { return Vec(mdl.warping(p[0]).value * Vec::Unit(m, 0)); },
                [mdl](const Vec& p) { return mdl.warping(p[0]).derivative; },
                [](const Vec&, const Vec&) { return 0.0; }};
      }
      if (kind == BuiltinKind::AntiTorqued) {
        return {"d/dt", TorseClass::AntiTorqued, [m](const Vec&) { return Vec(Vec::Unit(m, 0)); },
                [mdl](const Vec& p) {
                  const Dual w = mdl.warping(p[0]);
                  return w.derivative / w.value;
                },
                [mdl](const Vec& p, const Vec& t) {
                  const Dual w = mdl.warping(p[0]);
                  return -(w.derivative / w.value) * t[0];
                }};
      }
      if (kind == BuiltinKind::Torqued) {
        // h = exp(a . x) depends on the fiber only; nabla_X (h rho d_t) = h rho' X + d(log h)(X) h rho d_t.
        const Vec a = vector_param(m - 1, Vec::Unit(m - 1, 0));
        auto h = [a, m](const Vec& p) { return std::exp(a.dot(p.tail(m - 1))); };
        return {"h rho d/dt", TorseClass::Torqued,
                [mdl, h, m](const Vec& p) { return Vec(h(p) * mdl.warping(p[0]).value * Vec::Unit(m, 0)); },
                [mdl, h](const Vec& p) { return h(p) * mdl.warping(p[0]).derivative; },
                [a, m](const Vec&, const Vec& t) { return a.dot(t.tail(m - 1)); }};
      }
      return unsupported();
    }
  }
  return unsupported();
}

RestrictedField restrict_to(const BuiltinField& builtin, const ArcLengthCurve& curve) {
  const std::size_t n = curve.grid.size();
  std::vector<Vec> vectors(n);
  std::vector<double> f(n);
  std::vector<double> omega(n);
  for (std::size_t i = 0; i < n; ++i) {
    vectors[i] = builtin.field(curve.points[i]);
    f[i] = builtin.potential(curve.points[i]);
    omega[i] = builtin.omega(curve.points[i], curve.velocity[i]);
  }
  return {FieldAlongCurve{curve.grid, std::move(vectors)},
          TorseFormingLaw{ScalarSeries(curve.grid, f), ScalarSeries(curve.grid, omega), builtin.cls}};
}

}  // namespace pacurves
