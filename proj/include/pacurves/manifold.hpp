#pragma once

#include "pacurves/expression.hpp"
#include "pacurves/numerics.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pacurves {

struct ArcLengthCurve;

enum class ModelKind { Euclidean, Sphere, HyperbolicHalfSpace, HyperbolicHyperboloid, WarpedProduct };

/// A model Riemannian space of dimension m >= 2.
///
/// Points and tangent vectors are stored in chart coordinates (Euclidean,
/// half-space, warped product) or ambient coordinates (sphere in R^{m+1},
/// hyperboloid in Lorentz R^{m+1} with the last coordinate timelike). The
/// sphere and hyperboloid parameter c is the radius (resp. pseudo-radius),
/// so the sectional curvature is +-1/c^2. The warped product is
/// J x_rho R^{m-1} with coordinates (t, x_1, ..., x_{m-1}).
class ManifoldModel {
 public:
  static constexpr double kHalfSpaceGuard = 1e-8;
  static constexpr double kEmbeddingTolerance = 1e-9;

  static ManifoldModel euclidean(int m);
  static ManifoldModel sphere(int m, double radius);
  static ManifoldModel half_space(int m);
  static ManifoldModel hyperboloid(int m, double radius);
  /// `rho` is an expression in `t`; its derivative comes from the expression.
  static ManifoldModel warped(int m, const std::string& rho);

  /// Parses "euclidean:3", "sphere:3:2.0", "halfspace:2", "hyperboloid:3:1",
  /// "warped:3:exp(t)".
  static ManifoldModel parse(std::string_view spec);
  std::string spec() const;

  ModelKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  /// Length of a coordinate tuple: m for charts, m + 1 for embedded models.
  int coord_dim() const noexcept { return embedded() ? dim_ + 1 : dim_; }
  double radius() const noexcept { return radius_; }
  bool embedded() const noexcept {
    return kind_ == ModelKind::Sphere || kind_ == ModelKind::HyperbolicHyperboloid;
  }

  /// Warping function and its derivative (warped products only).
  Dual warping(double t) const;

  /// Throws a domain error when p is not a valid point of the model.
  void check_point(const Vec& p) const;
  /// Distance from the embedding constraint (0 for chart models).
  double constraint_defect(const Vec& p) const;
  /// Nearest valid point for embedded models; identity for charts.
  Vec retract(const Vec& p) const;

  /// Ambient bilinear form for embedded models (Euclidean or Lorentz).
  double ambient_inner(const Vec& u, const Vec& v) const;

  /// Metric at p. No base-point bookkeeping; see metric_eval for the checked form.
  double inner(const Vec& p, const Vec& u, const Vec& v) const;
  double norm(const Vec& p, const Vec& v) const;

  /// Connection term: along a curve with velocity u, nabla_u V = dV/ds + christoffel(p, u, V).
  /// For embedded models this is the normal correction of the Gauss formula and
  /// is exact for tangent V.
  Vec christoffel(const Vec& p, const Vec& u, const Vec& v) const;

  /// Orthogonal projection onto T_pM (embedded models); identity for charts.
  Vec tangent_part(const Vec& p, const Vec& v) const;

  /// Sign-carrying volume of an m-frame (orientation test).
  double orientation(const Vec& p, std::span<const Vec> frame) const;

  /// Positively oriented orthonormal basis of T_pM.
  std::vector<Vec> canonical_frame(const Vec& p) const;

  /// Unit vector orthogonal to `partial` (m - 1 orthonormal vectors) that makes
  /// the completed frame positively oriented.
  Vec complete_frame(const Vec& p, std::span<const Vec> partial) const;

  /// Metric Gram-Schmidt in order, after projecting onto T_pM.
  std::vector<Vec> orthonormalize(const Vec& p, std::span<const Vec> frame) const;

  /// Largest |<X_i, X_j> - delta_ij| over the frame.
  double gram_defect(const Vec& p, std::span<const Vec> frame) const;

 private:
  ManifoldModel(ModelKind kind, int dim, double radius, std::optional<Expression> rho);

  ModelKind kind_;
  int dim_;
  double radius_;
  std::optional<Expression> rho_;
};

struct TangentVector {
  Vec base;
  Vec components;
};

/// Unit vector fields and general fields sampled along a curve; vectors[i]
/// is based at the curve point with index i.
struct FieldAlongCurve {
  Grid grid;
  std::vector<Vec> vectors;

  std::size_t size() const noexcept { return vectors.size(); }
};

double metric_eval(const ManifoldModel& model, const Vec& p, const TangentVector& u, const TangentVector& v);

/// nabla_T V at every node. Embedded models differentiate in the ambient space
/// and project; chart models add the Christoffel term.
FieldAlongCurve covariant_derivative_along(const ArcLengthCurve& curve, const FieldAlongCurve& field);

TangentVector tangent_project(const ManifoldModel& model, const Vec& p, const Vec& v);

/// One line per supported model kind, with its spec-string syntax.
std::vector<std::string> model_catalog();

}  // namespace pacurves
