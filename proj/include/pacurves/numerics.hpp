#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace pacurves {

using Vec = Eigen::VectorXd;

/// Strictly increasing parameter samples. Copies share the node storage.
class Grid {
 public:
  static constexpr std::size_t kMinNodes = 7;

  explicit Grid(std::vector<double> nodes);

  /// Nodes a, a+h, ..., b. The span must be a whole number of steps (to 1e-9).
  static Grid uniform(double a, double b, double h);

  std::size_t size() const noexcept { return nodes_->size(); }
  double operator[](std::size_t i) const { return (*nodes_)[i]; }
  double front() const { return nodes_->front(); }
  double back() const { return nodes_->back(); }
  std::span<const double> nodes() const noexcept { return *nodes_; }

  bool contains(double s) const noexcept { return s >= front() && s <= back(); }
  /// Index of the interval [s_i, s_{i+1}] containing s (clamped to the grid).
  std::size_t interval(double s) const;
  std::size_t nearest(double s) const;
  /// Index of the node equal to s (to 1e-9); domain error if s is not a node.
  std::size_t index_of(double s) const;
  std::size_t mid_index() const noexcept { return size() / 2; }

  friend bool operator==(const Grid& a, const Grid& b);

 private:
  std::shared_ptr<const std::vector<double>> nodes_;
};

/// Scalar samples on a grid. `exact_derivative`, when set, holds analytic
/// derivative samples and is preferred over finite differences downstream.
struct ScalarSeries {
  Grid grid;
  std::vector<double> values;
  std::optional<std::vector<double>> exact_derivative;

  ScalarSeries(Grid g, std::vector<double> v, std::optional<std::vector<double>> d = std::nullopt);

  static ScalarSeries constant(const Grid& g, double c);
  static ScalarSeries from_function(const Grid& g, const std::function<double(double)>& fn);

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  bool has_exact_derivative() const noexcept { return exact_derivative.has_value(); }
};

struct VectorSeries {
  Grid grid;
  std::vector<Vec> values;

  VectorSeries(Grid g, std::vector<Vec> v);
  std::size_t size() const noexcept { return values.size(); }
};

using OdeRhs = std::function<Vec(double s, const Vec& y)>;
/// Called after every accepted step; may correct the state in place.
using StepHook = std::function<void(double s, Vec& y)>;

/// Classical RK4 with one step per grid interval. y0 is the state at grid.front().
VectorSeries integrate_ivp(const OdeRhs& rhs, const Vec& y0, const Grid& grid,
                           const StepHook& after_step = {});
/// Same, with y0 given at grid[anchor]; integrates forward and backward from there.
VectorSeries integrate_ivp_from(const OdeRhs& rhs, const Vec& y0, const Grid& grid, std::size_t anchor,
                                const StepHook& after_step = {});

/// Seven-point finite differences (sixth order), one-sided near the ends.
ScalarSeries differentiate_series(const ScalarSeries& x);
VectorSeries differentiate_series(const VectorSeries& x);

/// The analytic derivative when the series carries one, finite differences otherwise.
ScalarSeries derivative_of(const ScalarSeries& x);

/// Antiderivative taking `anchor_value` at `anchor_s`. Each interval is
/// integrated against the local cubic interpolant.
ScalarSeries cumulative_integral(const ScalarSeries& x, double anchor_s, double anchor_value);

/// Local cubic (four-node Lagrange) interpolation.
double interpolate(const ScalarSeries& x, double s);
Vec interpolate(const VectorSeries& x, double s);
double interpolate(const Grid& grid, std::span<const double> values, double s);

struct LinearFit {
  std::vector<double> coefficients;
  double rms = 0.0;
};

LinearFit fit_linear_basis(std::span<const ScalarSeries> basis, const ScalarSeries& target);

// Small helpers used across modules.
double max_abs(std::span<const double> v);
double rms(std::span<const double> v);
std::vector<double> difference(std::span<const double> a, std::span<const double> b);

}  // namespace pacurves
