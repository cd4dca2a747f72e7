#pragma once

#include "pacurves/curve.hpp"
#include "pacurves/report.hpp"
#include "pacurves/transport.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pacurves {

/// A transport run with a closed-form answer.
struct TransportCase {
  TorseFormingLaw law;
  double anchor_s = 0.0;
  Vec v0;
  FieldAlongCurve expected;
};

/// A worked example with closed-form curve, field and expected profiles.
struct GoldenFixture {
  std::string id;
  std::string title;
  ArcLengthCurve curve;
  /// Unit field along the curve (from a builtin field), if any.
  std::optional<FieldAlongCurve> field;
  std::optional<TorseFormingLaw> builtin_law;
  std::optional<TorseClass> expected_class;
  /// kappa, tau, f, omega, cos_theta, lambda0, lambda1, tau_over_kappa, p.
  std::map<std::string, ScalarSeries> expected;
  std::optional<TransportCase> transport;
  std::map<std::string, double> parameters;
  std::vector<std::string> checks;
};

std::vector<std::string> fixture_ids();

/// Loads and samples a fixture on its default grid (or with another step),
/// then checks that its closed forms are mutually consistent.
GoldenFixture load_fixture(const std::string& id, std::optional<double> step = std::nullopt);
/// Same, from fixture JSON text.
GoldenFixture parse_fixture(const std::string& json_text, std::optional<double> step = std::nullopt);

struct GoldenTolerances {
  double profile = 1e-6;      // kappa, tau, cos theta, transported fields
  double coefficient = 1e-5;  // lambda_i, f, omega, tau/kappa, p
  double residual = 1e-4;     // PA system, geodesic sphere, cross-checks
  double fit = 1e-4;          // sphere-fit constants
  double lancret = 1e-5;
  double normal_dt = 1e-8;
  double rectifying = 1e-6;
  double law_residual = 1e-6;
};

Report run_golden(const GoldenFixture& fixture, const GoldenTolerances& tolerances = {});
Report run_golden(const std::string& id, const GoldenTolerances& tolerances = {});

}  // namespace pacurves
