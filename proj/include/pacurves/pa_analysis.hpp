#pragma once

#include "pacurves/curve.hpp"
#include "pacurves/numerics.hpp"
#include "pacurves/report.hpp"
#include "pacurves/transport.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pacurves {

/// Angle and coefficients of a unit field against a Frenet frame:
/// V = lambda_0 T + cos(theta) N + lambda_1 B_1 + ... (m >= 3), or
/// V = lambda_0 T + cos(theta) N with lambda_0 = sin(oriented_theta) (m = 2).
struct PADecomposition {
  /// arccos <V, N>, in [0, pi].
  ScalarSeries theta;
  /// Continuous signed angle: atan2(lambda_1, cos theta) for m >= 3 and
  /// atan2(lambda_0, cos theta) for m = 2, unwrapped along the grid.
  ScalarSeries oriented_theta;
  ScalarSeries cos_theta;
  /// lambda_0 ... lambda_{m-2}.
  std::vector<ScalarSeries> lambdas;

  int dim() const noexcept { return static_cast<int>(lambdas.size()) + 1; }
  const Grid& grid() const noexcept { return theta.grid; }
  /// Largest |cos^2 theta + sum lambda_i^2 - 1|.
  double norm_defect() const;
  /// Coefficients in frame order: lambda_0, cos theta, lambda_1, ...
  std::vector<const ScalarSeries*> frame_coefficients() const;
};

/// Unit-length tolerance for fields handed to decompose().
inline constexpr double kUnitFieldTolerance = 1e-6;
/// Below this |cos theta| the explicit curvature formulas are not used.
inline constexpr double kNearOrthogonal = 1e-4;

PADecomposition decompose(const ArcLengthCurve& curve, const FrenetData& frenet, const FieldAlongCurve& field);

/// Decomposition of a 3D field from a prescribed oriented angle and lambda_0:
/// lambda_1 = sign * sqrt(1 - lambda_0^2 - cos^2 theta). Derivatives follow
/// by the chain rule from the inputs' derivatives.
PADecomposition decomposition_3d(const ScalarSeries& oriented_theta, const ScalarSeries& lambda0, int sign);
/// Decomposition of a 2D field V = sin(theta) T + cos(theta) N.
PADecomposition decomposition_2d(const ScalarSeries& oriented_theta);

/// Field assembled from a decomposition on a Frenet frame.
FieldAlongCurve assemble_field(const FrenetData& frenet, const PADecomposition& decomp);

struct ResidualSeries {
  std::string name;
  ScalarSeries values;
  double max_abs = 0.0;
  double rms = 0.0;
};

struct ResidualReport {
  std::vector<ResidualSeries> equations;
  double tolerance = 1e-4;
  bool pass = false;

  void add(std::string name, ScalarSeries values);
  double max_residual() const;
  const ResidualSeries& at(const std::string& name) const;
  /// One quantity per equation, named prefix + equation name.
  void export_to(Report& report, const std::string& prefix) const;
};

/// Equations of the PA system, one per frame vector, in the sign convention
/// f(1 - lambda_0^2) - lambda_0' + kappa_1 cos theta = 0 for the first.
ResidualReport pa_system_residuals(const CurvatureProfile& curvatures, const ScalarSeries& f,
                                   const PADecomposition& decomp, double tolerance = 1e-4);

/// theta = pi/2: V = tanh(p) T + branch * sech(p) B with p = int f + r.
struct OrthogonalAnalysis {
  ScalarSeries p;
  double r = 0.0;
  int branch = 1;
  /// tau / kappa from the supplied curvatures.
  ScalarSeries ratio;
  ResidualReport fit;
};

OrthogonalAnalysis orthogonal_angle_analysis(const CurvatureProfile& curvatures, const ScalarSeries& f,
                                             const PADecomposition& decomp, double tolerance = 1e-4);

enum class CurvatureMode { General3d, Concircular };

CurvatureProfile curvatures_from_pa(const ScalarSeries& f, const PADecomposition& decomp, CurvatureMode mode);

/// Residual of (1/tau (1/kappa)')' + tau/kappa = 0. When kappa carries no
/// exact derivative, the six nodes at each end are left out of the report.
ResidualReport geodesic_sphere_residual(const CurvatureProfile& profile, double tolerance = 1e-4);

struct SphereFit {
  double a = 0.0;
  double b = 0.0;
  double rms = 0.0;
};

/// Least-squares fit 1/f = a tan(theta) + b (theta oriented).
SphereFit sphere_potential_fit(const ScalarSeries& f, const ScalarSeries& theta);

struct LancretReport {
  double r0 = 0.0;
  double r1 = 0.0;
  /// max |tau/kappa - r0|.
  double ratio_spread = 0.0;
  bool lancret = false;
  /// Set when f is constant: nodes used in the closed-form curvature comparison.
  std::size_t closed_form_nodes = 0;
  ResidualReport residuals;
};

LancretReport lancret_concircular_check(const ScalarSeries& f, const PADecomposition& decomp,
                                        const CurvatureProfile& profile, double tolerance = 1e-5);

struct SurfaceCurvature {
  ScalarSeries kappa;
};

/// kappa = theta' - cos(theta) f for a 2D decomposition.
SurfaceCurvature surface_pa_curvature(const ScalarSeries& f, const PADecomposition& decomp);

struct GrimReaperCheck {
  /// Integration constant C in kappa = sech(s + int f + C).
  double constant = 0.0;
  ResidualReport residuals;
};

/// Compares kappa against sech(s + int f + C), with C fitted at the grid midpoint,
/// and against cos theta.
GrimReaperCheck grim_reaper_check(const ScalarSeries& kappa, const ScalarSeries& f, const PADecomposition& decomp,
                                  double tolerance = 1e-6);

/// Curvature of a half-plane curve from its Euclidean curvature and normal.
ScalarSeries halfplane_curvature(const ArcLengthCurve& curve);

/// Everything the analyzer can say about a curve and an optional field.
struct Analysis {
  FrenetData frenet;
  std::optional<PADecomposition> decomposition;
  std::optional<LawEstimate> law;
  Report report;
};

Analysis analyze(const ArcLengthCurve& curve, const std::optional<FieldAlongCurve>& field, double tolerance = 1e-4);

}  // namespace pacurves
