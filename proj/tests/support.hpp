#pragma once

#include "pacurves/curve.hpp"
#include "pacurves/error.hpp"
#include "pacurves/expression.hpp"
#include "pacurves/manifold.hpp"
#include "pacurves/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace testing {

using namespace pacurves;

inline double sech(double x) { return 1.0 / std::cosh(x); }

/// Largest |a[i] - ref(s_i)| over the grid.
inline double max_dev(const ScalarSeries& a, const std::function<double(double)>& ref) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - ref(a.grid[i])));
  return worst;
}

/// Curve from a closed form with its exact velocity.
inline ArcLengthCurve closed_curve(const ManifoldModel& model, const Grid& grid, const std::function<Vec(double)>& x,
                                   const std::function<Vec(double)>& dx) {
  std::vector<Vec> p, v;
  for (double s : grid.nodes()) {
    p.push_back(x(s));
    v.push_back(dx(s));
  }
  return ArcLengthCurve::from_samples(model, grid, std::move(p), std::move(v));
}

inline Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

/// Fourth-order Richardson-extrapolated central difference, the test side's
/// own differentiator for closed forms.
inline double brute_derivative(const std::function<double(double)>& g, double s, double h = 1e-3) {
  const auto d = [&](double k) { return (g(s + k) - g(s - k)) / (2 * k); };
  return (4 * d(h / 2) - d(h)) / 3;
}

/// Composite Simpson quadrature with n (even) panels.
inline double simpson(const std::function<double(double)>& g, double a, double b, int n = 2000) {
  const double h = (b - a) / n;
  double acc = g(a) + g(b);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4 : 2) * g(a + i * h);
  return acc * h / 3;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testing
