#pragma once

#include "pacurves/manifold.hpp"
#include "pacurves/numerics.hpp"

#include <optional>
#include <span>
#include <vector>

namespace pacurves {

/// A unit-speed curve sampled on its arc-length grid.
struct ArcLengthCurve {
  static constexpr double kSpeedTolerance = 1e-6;

  ManifoldModel model;
  Grid grid;
  std::vector<Vec> points;
  std::vector<Vec> velocity;

  /// Validates the samples: points on the model, tangent velocities of unit length.
  static ArcLengthCurve from_samples(ManifoldModel model, Grid grid, std::vector<Vec> points,
                                     std::vector<Vec> velocity);

  FieldAlongCurve tangent_field() const { return FieldAlongCurve{grid, velocity}; }
  double max_speed_defect() const;
};

/// Reparametrizes a regular curve sampled on any increasing parameter grid by
/// arc length. The output grid is uniform with the same node count and starts
/// at the first raw parameter value.
ArcLengthCurve arclength_reparametrize(const ManifoldModel& model, const Grid& raw_parameter,
                                       const std::vector<Vec>& raw_points);

/// kappa[i] holds the curvature kappa_{i+1}. The last one is signed.
struct CurvatureProfile {
  std::vector<ScalarSeries> kappa;

  const ScalarSeries& curvature() const { return kappa.at(0); }
  const ScalarSeries& torsion() const { return kappa.at(1); }
};

/// Frenet frame X_1 = T, X_2 = N, X_3.. = B_1.. and the curvature profile.
struct FrenetData {
  std::vector<FieldAlongCurve> frame;
  CurvatureProfile curvatures;

  const FieldAlongCurve& tangent() const { return frame.at(0); }
  const FieldAlongCurve& normal() const { return frame.at(1); }
  const FieldAlongCurve& binormal(std::size_t i = 1) const { return frame.at(i + 1); }
};

/// Gram-Schmidt pivots below this value mean the curve is not a Frenet curve.
inline constexpr double kFrenetPivotTolerance = 1e-7;

/// Frenet apparatus from iterated covariant derivatives of the velocity. The
/// last frame vector is completed by orientation and the last curvature is signed.
FrenetData frenet_apparatus(const ArcLengthCurve& curve);

/// Largest norm of nabla_T X_i - (-kappa_{i-1} X_{i-1} + kappa_i X_{i+1}).
double frenet_residual(const ArcLengthCurve& curve, const FrenetData& frenet);

struct SynthesizedCurve {
  ArcLengthCurve curve;
  FrenetData frenet;
  /// Largest frame Gram defect seen before each per-step re-orthonormalization.
  double max_gram_defect = 0.0;
  /// Largest embedding drift seen before each per-step retraction.
  double max_constraint_drift = 0.0;
};

/// Integrates the Frenet equations together with gamma' = T from the initial
/// point and frame at the anchor node (default grid.front()). The frame is
/// re-orthonormalized every step.
SynthesizedCurve frenet_synthesize(const ManifoldModel& model, const CurvatureProfile& profile, const Vec& p0,
                                   std::span<const Vec> frame0, const Grid& grid,
                                   std::optional<double> anchor_s = std::nullopt);

}  // namespace pacurves
