#pragma once

#include "pacurves/curve.hpp"
#include "pacurves/pa_analysis.hpp"
#include "pacurves/report.hpp"
#include "pacurves/transport.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pacurves {

/// Where and how the synthesized curve starts. An empty frame means the
/// model's canonical frame at p0 (for surfaces, the first vector may be given
/// alone as the initial tangent). The anchor defaults to the first grid node.
struct SynthesisStart {
  std::optional<Vec> p0;
  std::vector<Vec> frame0;
  std::optional<double> anchor_s;
};

/// A synthesized PA curve, its field and the round-trip verification.
struct SynthesisResult {
  SynthesizedCurve synthesized;
  /// The prescribed decomposition the field was assembled from.
  PADecomposition prescribed;
  FieldAlongCurve field;
  /// Anti-torqued law: omega(T) = -f lambda_0.
  TorseFormingLaw law;
  Report report;
};

/// Default start point: the origin of charts, the pole of embedded models,
/// (0, ..., 0, 1) in the half-space.
Vec default_point(const ManifoldModel& model);

/// 3D PA curve from (f, theta, lambda_0) and the branch of lambda_1.
SynthesisResult synthesize_pa_3d(const ManifoldModel& model, const ScalarSeries& f, const ScalarSeries& theta,
                                 const ScalarSeries& lambda0, int sign, const SynthesisStart& start = {},
                                 double tolerance = 1e-4);

/// 3D PA curve with theta = pi/2 from f, kappa and p(anchor) = r, where
/// p = int f + r. tau = sign kappa sinh p and V = tanh p T + sign sech p B.
SynthesisResult synthesize_orthogonal(const ManifoldModel& model, const ScalarSeries& f, const ScalarSeries& kappa,
                                      double r, int sign, const SynthesisStart& start = {}, double tolerance = 1e-4);

/// Curve in a surface with signed curvature kappa = theta' - cos(theta) f and
/// V = sin(theta) T + cos(theta) N.
SynthesisResult synthesize_pa_surface(const ManifoldModel& model, const ScalarSeries& f, const ScalarSeries& theta,
                                      const SynthesisStart& start = {}, double tolerance = 1e-4);

/// A parameter set as stored in data/synthesis/*.json.
struct SynthesisSpec {
  std::string name;
  /// "pa3d", "orthogonal" or "surface".
  std::string kind;
  std::string model;
  double a = 0.0;
  double b = 0.0;
  double step = 1e-3;
  std::string f;
  std::string theta;
  std::string lambda0 = "0";
  std::string kappa;
  double r = 0.0;
  int sign = 1;
  std::optional<std::vector<double>> p0;
  std::vector<std::vector<double>> frame0;
  std::optional<double> anchor;
  /// Closed-form expectations (kappa, tau, kappa_lancret with r0 and f0).
  std::vector<std::pair<std::string, std::string>> expect;
  std::optional<double> lancret_r0;
  std::optional<double> lancret_f0;
};

SynthesisSpec parse_synthesis_spec(const std::string& json_text);

/// Runs a parameter set; the report carries the spec's closed-form checks as well.
SynthesisResult run_synthesis_spec(const SynthesisSpec& spec, double tolerance = 1e-4);

}  // namespace pacurves
