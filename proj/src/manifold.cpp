#include "pacurves/manifold.hpp"

#include "pacurves/curve.hpp"
#include "pacurves/error.hpp"

#include <cmath>
#include <sstream>

namespace pacurves {

namespace {

std::vector<std::string> split(std::string_view text, char sep, std::size_t max_parts) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (parts.size() + 1 < max_parts) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) break;
    parts.emplace_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  parts.emplace_back(text.substr(start));
  return parts;
}

int parse_dim(const std::string& text) {
  std::size_t used = 0;
  int m = 0;
  try {
    m = std::stoi(text, &used);
  } catch (const std::exception&) {
    throw Error(ErrorCode::Usage, "bad model dimension '" + text + "'");
  }
  if (used != text.size()) throw Error(ErrorCode::Usage, "bad model dimension '" + text + "'");
  return m;
}

double parse_radius(const std::string& text) {
  std::size_t used = 0;
  double c = 0.0;
  try {
    c = std::stod(text, &used);
  } catch (const std::exception&) {
    throw Error(ErrorCode::Usage, "bad model radius '" + text + "'");
  }
  if (used != text.size()) throw Error(ErrorCode::Usage, "bad model radius '" + text + "'");
  return c;
}

}  // namespace

ManifoldModel::ManifoldModel(ModelKind kind, int dim, double radius, std::optional<Expression> rho)
    : kind_(kind), dim_(dim), radius_(radius), rho_(std::move(rho)) {
  if (dim_ < 2) throw Error(ErrorCode::Usage, "model dimension must be at least 2");
  if (embedded() && !(radius_ > 0.0)) throw Error(ErrorCode::Usage, "model radius must be positive");
}

ManifoldModel ManifoldModel::euclidean(int m) { return {ModelKind::Euclidean, m, 0.0, std::nullopt}; }
ManifoldModel ManifoldModel::sphere(int m, double radius) { return {ModelKind::Sphere, m, radius, std::nullopt}; }
ManifoldModel ManifoldModel::half_space(int m) { return {ModelKind::HyperbolicHalfSpace, m, 1.0, std::nullopt}; }
ManifoldModel ManifoldModel::hyperboloid(int m, double radius) {
  return {ModelKind::HyperbolicHyperboloid, m, radius, std::nullopt};
}
ManifoldModel ManifoldModel::warped(int m, const std::string& rho) {
  return {ModelKind::WarpedProduct, m, 0.0, Expression::parse(rho, "t")};
}

ManifoldModel ManifoldModel::parse(std::string_view spec) {
  const auto parts = split(spec, ':', 3);
  const std::string& kind = parts[0];
  auto need = [&](std::size_t n) {
    if (parts.size() != n) throw Error(ErrorCode::Usage, "malformed model spec '" + std::string(spec) + "'");
  };
  if (kind == "euclidean") {
    need(2);
    return euclidean(parse_dim(parts[1]));
  }
  if (kind == "sphere") {
    need(3);
    return sphere(parse_dim(parts[1]), parse_radius(parts[2]));
  }
  if (kind == "halfspace") {
    need(2);
    return half_space(parse_dim(parts[1]));
  }
  if (kind == "hyperboloid") {
    need(3);
    return hyperboloid(parse_dim(parts[1]), parse_radius(parts[2]));
  }
  if (kind == "warped") {
    need(3);
    return warped(parse_dim(parts[1]), parts[2]);
  }
  throw Error(ErrorCode::Usage, "unknown model kind '" + kind + "'");
}

std::string ManifoldModel::spec() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind_) {
    case ModelKind::Euclidean: out << "euclidean:" << dim_; break;
    case ModelKind::Sphere: out << "sphere:" << dim_ << ':' << radius_; break;
    case ModelKind::HyperbolicHalfSpace: out << "halfspace:" << dim_; break;
    case ModelKind::HyperbolicHyperboloid: out << "hyperboloid:" << dim_ << ':' << radius_; break;
    case ModelKind::WarpedProduct: out << "warped:" << dim_ << ':' << rho_->text(); break;
  }
  return out.str();
}

std::vector<std::string> model_catalog() {
  return {
      "euclidean:<m>            flat R^m",
      "sphere:<m>:<c>           S^m(c) of radius c in R^{m+1}",
      "halfspace:<m>            upper half-space H^m(-1), metric x_m^-2 <,>",
      "hyperboloid:<m>:<c>      H^m in Lorentz R^{m+1}, <p,p> = -c^2, last coordinate timelike",
      "warped:<m>:<rho(t)>      J x_rho R^{m-1}, metric dt^2 + rho(t)^2 |dx|^2",
  };
}

Dual ManifoldModel::warping(double t) const {
  if (!rho_) throw Error(ErrorCode::Unsupported, "model has no warping function");
  return rho_->eval(t);
}

void ManifoldModel::check_point(const Vec& p) const {
  if (p.size() != coord_dim()) throw Error(ErrorCode::Input, "point has wrong coordinate count");
  if (!p.allFinite()) throw Error(ErrorCode::Domain, "point is not finite");
  switch (kind_) {
    case ModelKind::Euclidean: return;
    case ModelKind::HyperbolicHalfSpace:
      if (!(p[dim_ - 1] > kHalfSpaceGuard)) throw Error(ErrorCode::Domain, "half-space point has x_m <= 1e-8");
      return;
    case ModelKind::WarpedProduct:
      if (!(warping(p[0]).value > 0.0)) throw Error(ErrorCode::Domain, "warping function is not positive");
      return;
    case ModelKind::Sphere:
    case ModelKind::HyperbolicHyperboloid:
      if (constraint_defect(p) > kEmbeddingTolerance * std::max(1.0, radius_)) {
        throw Error(ErrorCode::Domain, "point is off the embedded model");
      }
      if (kind_ == ModelKind::HyperbolicHyperboloid && !(p[dim_] > 0.0)) {
        throw Error(ErrorCode::Domain, "point is not on the upper sheet");
      }
      return;
  }
}

double ManifoldModel::constraint_defect(const Vec& p) const {
  switch (kind_) {
    case ModelKind::Sphere: return std::abs(p.norm() - radius_);
    case ModelKind::HyperbolicHyperboloid: {
      const double q = -ambient_inner(p, p);
      return q > 0.0 ? std::abs(std::sqrt(q) - radius_) : std::abs(q) + radius_;
    }
    default: return 0.0;
  }
}

Vec ManifoldModel::retract(const Vec& p) const {
  switch (kind_) {
    case ModelKind::Sphere: return p * (radius_ / p.norm());
    case ModelKind::HyperbolicHyperboloid: return p * (radius_ / std::sqrt(-ambient_inner(p, p)));
    default: return p;
  }
}

double ManifoldModel::ambient_inner(const Vec& u, const Vec& v) const {
  double acc = u.dot(v);
  if (kind_ == ModelKind::HyperbolicHyperboloid) acc -= 2.0 * u[dim_] * v[dim_];
  return acc;
}

double ManifoldModel::inner(const Vec& p, const Vec& u, const Vec& v) const {
  switch (kind_) {
    case ModelKind::Euclidean:
    case ModelKind::Sphere:
      return u.dot(v);
    case ModelKind::HyperbolicHyperboloid:
      return ambient_inner(u, v);
    case ModelKind::HyperbolicHalfSpace: {
      const double y = p[dim_ - 1];
      return u.dot(v) / (y * y);
    }
    case ModelKind::WarpedProduct: {
      const double rho = warping(p[0]).value;
      return u[0] * v[0] + rho * rho * (u.tail(dim_ - 1).dot(v.tail(dim_ - 1)));
    }
  }
  return 0.0;
}

double ManifoldModel::norm(const Vec& p, const Vec& v) const { return std::sqrt(std::max(0.0, inner(p, v, v))); }

Vec ManifoldModel::christoffel(const Vec& p, const Vec& u, const Vec& v) const {
  switch (kind_) {
    case ModelKind::Euclidean: return Vec::Zero(dim_);
    case ModelKind::Sphere:
    case ModelKind::HyperbolicHyperboloid:
      return (ambient_inner(u, v) / ambient_inner(p, p)) * p;
    case ModelKind::HyperbolicHalfSpace: {
      // Conformal factor x_m^-2: Gamma^k(u,v) = -(u^k v_m + v^k u_m - (u.v) delta_km) / x_m.
      const int last = dim_ - 1;
      const double y = p[last];
      Vec g = u * v[last] + v * u[last];
      g[last] -= u.dot(v);
      return -g / y;
    }
    case ModelKind::WarpedProduct: {
      // Horizontal-vertical mixing by (log rho)' and the normal part -rho rho' <X_2, Y_2>_F.
      const Dual w = warping(p[0]);
      const double rho = w.value;
      const double drho = w.derivative;
      Vec g(dim_);
      g[0] = -rho * drho * u.tail(dim_ - 1).dot(v.tail(dim_ - 1));
      g.tail(dim_ - 1) = (drho / rho) * (u[0] * v.tail(dim_ - 1) + v[0] * u.tail(dim_ - 1));
      return g;
    }
  }
  return Vec::Zero(coord_dim());
}

Vec ManifoldModel::tangent_part(const Vec& p, const Vec& v) const {
  if (!embedded()) return v;
  return v - (ambient_inner(v, p) / ambient_inner(p, p)) * p;
}

double ManifoldModel::orientation(const Vec& p, std::span<const Vec> frame) const {
  if (static_cast<int>(frame.size()) != dim_) throw Error(ErrorCode::Input, "frame must have m vectors");
  if (!embedded()) {
    Eigen::MatrixXd a(dim_, dim_);
    for (int j = 0; j < dim_; ++j) a.col(j) = frame[static_cast<std::size_t>(j)];
    return a.determinant();
  }
  // Outward (resp. future) unit normal first, then the frame.
  Eigen::MatrixXd a(dim_ + 1, dim_ + 1);
  a.col(0) = p / radius_;
  for (int j = 0; j < dim_; ++j) a.col(j + 1) = frame[static_cast<std::size_t>(j)];
  return a.determinant();
}

Vec ManifoldModel::complete_frame(const Vec& p, std::span<const Vec> partial) const {
  if (static_cast<int>(partial.size()) != dim_ - 1) throw Error(ErrorCode::Input, "partial frame must have m-1 vectors");
  Vec best;
  double best_norm = -1.0;
  for (int k = 0; k < coord_dim(); ++k) {
    Vec e = tangent_part(p, Vec::Unit(coord_dim(), k));
    for (const Vec& x : partial) e -= inner(p, e, x) * x;
    const double n = norm(p, e);
    if (n > best_norm) {
      best_norm = n;
      best = e / n;
    }
  }
  std::vector<Vec> frame(partial.begin(), partial.end());
  frame.push_back(best);
  if (orientation(p, frame) < 0.0) best = -best;
  return best;
}

std::vector<Vec> ManifoldModel::orthonormalize(const Vec& p, std::span<const Vec> frame) const {
  std::vector<Vec> out;
  out.reserve(frame.size());
  for (const Vec& x : frame) {
    Vec e = tangent_part(p, x);
    for (const Vec& q : out) e -= inner(p, e, q) * q;
    const double n = norm(p, e);
    if (!(n > 0.0)) throw Error(ErrorCode::Input, "frame vectors are linearly dependent");
    out.push_back(e / n);
  }
  return out;
}

double ManifoldModel::gram_defect(const Vec& p, std::span<const Vec> frame) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    for (std::size_t j = i; j < frame.size(); ++j) {
      const double target = i == j ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(inner(p, frame[i], frame[j]) - target));
    }
    if (embedded()) worst = std::max(worst, std::abs(ambient_inner(frame[i], p)) / radius_);
  }
  return worst;
}

std::vector<Vec> ManifoldModel::canonical_frame(const Vec& p) const {
  check_point(p);
  std::vector<Vec> frame;
  if (!embedded()) {
    for (int k = 0; k < dim_; ++k) {
      Vec e = Vec::Unit(dim_, k);
      frame.push_back(e / norm(p, e));
    }
    return frame;
  }
  // Greedy Gram-Schmidt over the ambient basis, keeping the m best-conditioned directions.
  std::vector<bool> used(static_cast<std::size_t>(coord_dim()), false);
  for (int step = 0; step < dim_ - 1; ++step) {
    int pick = -1;
    Vec best;
    double best_norm = -1.0;
    for (int k = 0; k < coord_dim(); ++k) {
      if (used[static_cast<std::size_t>(k)]) continue;
      Vec e = tangent_part(p, Vec::Unit(coord_dim(), k));
      for (const Vec& x : frame) e -= inner(p, e, x) * x;
      const double n = norm(p, e);
      if (n > best_norm) {
        best_norm = n;
        best = e / n;
        pick = k;
      }
    }
    used[static_cast<std::size_t>(pick)] = true;
    frame.push_back(best);
  }
  frame.push_back(complete_frame(p, frame));
  return frame;
}

// ---------------------------------------------------------------- free operations

double metric_eval(const ManifoldModel& model, const Vec& p, const TangentVector& u, const TangentVector& v) {
  if (u.base.size() != p.size() || v.base.size() != p.size() || (u.base - p).lpNorm<Eigen::Infinity>() > 1e-12 ||
      (v.base - p).lpNorm<Eigen::Infinity>() > 1e-12) {
    throw Error(ErrorCode::Usage, "tangent vectors are not based at the evaluation point");
  }
  model.check_point(p);
  return model.inner(p, u.components, v.components);
}

FieldAlongCurve covariant_derivative_along(const ArcLengthCurve& curve, const FieldAlongCurve& field) {
  if (!(field.grid == curve.grid)) throw Error(ErrorCode::Usage, "field is not sampled on the curve grid");
  const ManifoldModel& model = curve.model;
  const VectorSeries d = differentiate_series(VectorSeries(field.grid, field.vectors));
  std::vector<Vec> out(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    const Vec& p = curve.points[i];
    if (model.kind() == ModelKind::HyperbolicHalfSpace && !(p[model.dim() - 1] > ManifoldModel::kHalfSpaceGuard)) {
      throw Error(ErrorCode::Domain, "curve reaches the half-space boundary", curve.grid[i]);
    }
    if (model.embedded()) {
      out[i] = model.tangent_part(p, d.values[i]);
    } else {
      out[i] = d.values[i] + model.christoffel(p, curve.velocity[i], field.vectors[i]);
    }
  }
  return FieldAlongCurve{field.grid, std::move(out)};
}

TangentVector tangent_project(const ManifoldModel& model, const Vec& p, const Vec& v) {
  if (!model.embedded()) throw Error(ErrorCode::Unsupported, "tangent projection needs an embedded model");
  if (v.size() != model.coord_dim()) throw Error(ErrorCode::Input, "ambient vector has wrong size");
  return TangentVector{p, model.tangent_part(p, v)};
}

}  // namespace pacurves
