#pragma once

#include "pacurves/curve.hpp"
#include "pacurves/manifold.hpp"
#include "pacurves/numerics.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pacurves {

enum class TorseClass { Generic, Concircular, Torqued, AntiTorqued, Parallel };

const char* to_string(TorseClass cls);
TorseClass parse_torse_class(const std::string& name);

/// Potential function f and omega(T) along a curve, so that
/// nabla_T V = f T + omega(T) V.
///
/// For the anti-torqued class `omega_t` is informational only: transport
/// recomputes omega(T) = -f <V, T> from the evolving field.
struct TorseFormingLaw {
  ScalarSeries f;
  ScalarSeries omega_t;
  TorseClass cls = TorseClass::Generic;
};

/// Integrates nabla_T V = f T + omega(T) V from V0 given at the anchor node
/// (default: the first curve point).
FieldAlongCurve transport_field(const ArcLengthCurve& curve, const TorseFormingLaw& law, const Vec& v0,
                                std::optional<double> anchor_s = std::nullopt);

/// Thresholds used when classifying an estimated law.
struct LawThresholds {
  double zero = 1e-6;
  /// Nodes where the angle between T and V is below this are skipped.
  double min_angle = 1e-4;
  /// Above this remainder the field is reported as not torse-forming.
  double max_residual = 1e-5;
};

struct LawEstimate {
  TorseFormingLaw law;
  /// Norm of the part of nabla_T V outside span{T, V}.
  double rms_residual = 0.0;
  double max_residual = 0.0;
  std::vector<bool> used;
  std::string note;
};

/// Solves nabla_T V = f T + omega(T) V pointwise in the least-squares sense
/// and classifies the result.
LawEstimate estimate_law(const ArcLengthCurve& curve, const FieldAlongCurve& field, const LawThresholds& thresholds = {});

enum class BuiltinKind {
  Parallel,     // constant vector (Euclidean)
  Concircular,  // rho d_t, r Phi, tangential part of a constant vector
  Torqued,      // h rho d_t with h = exp(a . x) on the fiber
  AntiTorqued,  // d_t, Phi/|Phi|, -x_m d_{x_m}
};

BuiltinKind parse_builtin_kind(const std::string& name);

/// A globally defined torse-forming field of a model with its closed-form law.
struct BuiltinField {
  std::string name;
  TorseClass cls;
  std::function<Vec(const Vec& p)> field;
  std::function<double(const Vec& p)> potential;
  /// omega evaluated on a tangent vector at p.
  std::function<double(const Vec& p, const Vec& t)> omega;
};

/// Parameters: Parallel and Concircular on embedded models take the constant
/// ambient vector; Concircular on Euclidean takes r (default 1); Torqued takes
/// the fiber coefficients a. Others take none.
BuiltinField builtin_field(const ManifoldModel& model, BuiltinKind kind, const std::vector<double>& params = {});

struct RestrictedField {
  FieldAlongCurve field;
  TorseFormingLaw law;
};

RestrictedField restrict_to(const BuiltinField& builtin, const ArcLengthCurve& curve);

}  // namespace pacurves
