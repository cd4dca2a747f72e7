#include "pacurves/numerics.hpp"

#include "pacurves/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace pacurves {

namespace {

constexpr std::size_t kStencil = 7;

// Fornberg's recursion for first-derivative weights on arbitrary nodes.
std::array<double, kStencil> derivative_weights(const double* x, double x0) {
  double c[kStencil][2] = {};
  double c1 = 1.0;
  double c4 = x[0] - x0;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < kStencil; ++i) {
    const std::size_t mn = std::min<std::size_t>(i, 1);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k) {
          c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k) {
        c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
      }
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::array<double, kStencil> w{};
  for (std::size_t i = 0; i < kStencil; ++i) w[i] = c[i][1];
  return w;
}

std::size_t stencil_start(std::size_t i, std::size_t n) {
  constexpr std::size_t half = kStencil / 2;
  if (i < half) return 0;
  return std::min(i - half, n - kStencil);
}

void require_stencil(const Grid& g) {
  if (g.size() < kStencil) {
    throw Error(ErrorCode::Size, "series needs at least 7 nodes for differentiation");
  }
}

// Integral over [a, b] of the cubic through (x[k], y[k]), k = 0..3.
double cubic_segment_integral(const double* x, const double* y, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const double g = half / std::sqrt(3.0);
  double total = 0.0;
  for (double t : {mid - g, mid + g}) {
    double p = 0.0;
    for (int k = 0; k < 4; ++k) {
      double l = 1.0;
      for (int j = 0; j < 4; ++j) {
        if (j != k) l *= (t - x[j]) / (x[k] - x[j]);
      }
      p += y[k] * l;
    }
    total += p;
  }
  return total * half;
}

std::size_t cubic_start(std::size_t interval, std::size_t n) {
  if (interval == 0) return 0;
  return std::min(interval - 1, n - 4);
}

}  // namespace

// ---------------------------------------------------------------- Grid

Grid::Grid(std::vector<double> nodes) {
  if (nodes.size() < kMinNodes) {
    throw Error(ErrorCode::Size, "grid needs at least " + std::to_string(kMinNodes) + " nodes");
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!std::isfinite(nodes[i])) throw Error(ErrorCode::Input, "grid node is not finite");
    if (i > 0 && !(nodes[i] > nodes[i - 1])) {
      throw Error(ErrorCode::Input, "grid must be strictly increasing", nodes[i]);
    }
  }
  const double span = nodes.back() - nodes.front();
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (nodes[i] - nodes[i - 1] < 1e-12 * std::max(1.0, span)) {
      throw Error(ErrorCode::Input, "grid spacing too small", nodes[i]);
    }
  }
  nodes_ = std::make_shared<const std::vector<double>>(std::move(nodes));
}

Grid Grid::uniform(double a, double b, double h) {
  if (!(h > 0.0) || !(b > a)) throw Error(ErrorCode::Usage, "uniform grid needs a < b and h > 0");
  const double steps = (b - a) / h;
  const auto n = static_cast<std::size_t>(std::llround(steps));
  if (std::abs(steps - static_cast<double>(n)) > 1e-9 * std::max(1.0, steps)) {
    std::ostringstream msg;
    msg << "span [" << a << ", " << b << "] is not a whole number of steps " << h;
    throw Error(ErrorCode::Usage, msg.str());
  }
  std::vector<double> nodes(n + 1);
  for (std::size_t i = 0; i <= n; ++i) nodes[i] = a + static_cast<double>(i) * h;
  nodes.back() = b;
  return Grid(std::move(nodes));
}

std::size_t Grid::interval(double s) const {
  const auto& v = *nodes_;
  auto it = std::upper_bound(v.begin(), v.end(), s);
  std::size_t i = it == v.begin() ? 0 : static_cast<std::size_t>(it - v.begin()) - 1;
  return std::min(i, v.size() - 2);
}

std::size_t Grid::index_of(double s) const {
  const std::size_t i = nearest(s);
  if (std::abs((*this)[i] - s) > 1e-9 * std::max(1.0, std::abs(s))) {
    throw Error(ErrorCode::Domain, "anchor is not a grid node", s);
  }
  return i;
}

std::size_t Grid::nearest(double s) const {
  const std::size_t i = interval(s);
  return std::abs(s - (*nodes_)[i]) <= std::abs((*nodes_)[i + 1] - s) ? i : i + 1;
}

bool operator==(const Grid& a, const Grid& b) {
  return a.nodes_ == b.nodes_ || *a.nodes_ == *b.nodes_;
}

// ---------------------------------------------------------------- series

ScalarSeries::ScalarSeries(Grid g, std::vector<double> v, std::optional<std::vector<double>> d)
    : grid(std::move(g)), values(std::move(v)), exact_derivative(std::move(d)) {
  if (values.size() != grid.size()) throw Error(ErrorCode::Input, "series length differs from grid");
  if (exact_derivative && exact_derivative->size() != grid.size()) {
    throw Error(ErrorCode::Input, "derivative length differs from grid");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw Error(ErrorCode::Domain, "series value is not finite", grid[i]);
  }
}

ScalarSeries ScalarSeries::constant(const Grid& g, double c) {
  return ScalarSeries(g, std::vector<double>(g.size(), c), std::vector<double>(g.size(), 0.0));
}

ScalarSeries ScalarSeries::from_function(const Grid& g, const std::function<double(double)>& fn) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = fn(g[i]);
  return ScalarSeries(g, std::move(v));
}

VectorSeries::VectorSeries(Grid g, std::vector<Vec> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) throw Error(ErrorCode::Input, "series length differs from grid");
}

// ---------------------------------------------------------------- integration

VectorSeries integrate_ivp(const OdeRhs& rhs, const Vec& y0, const Grid& grid, const StepHook& after_step) {
  return integrate_ivp_from(rhs, y0, grid, 0, after_step);
}

VectorSeries integrate_ivp_from(const OdeRhs& rhs, const Vec& y0, const Grid& grid, std::size_t anchor,
                                const StepHook& after_step) {
  if (anchor >= grid.size()) throw Error(ErrorCode::Domain, "integration anchor outside the grid");
  if (!y0.allFinite()) throw Error(ErrorCode::Blowup, "initial state is not finite", grid[anchor]);
  std::vector<Vec> out(grid.size());
  out[anchor] = y0;

  auto step = [&](std::size_t from, std::size_t to) {
    const Vec& y = out[from];
    const double s = grid[from];
    const double h = grid[to] - s;
    const Vec k1 = rhs(s, y);
    const Vec k2 = rhs(s + 0.5 * h, y + 0.5 * h * k1);
    const Vec k3 = rhs(s + 0.5 * h, y + 0.5 * h * k2);
    const Vec k4 = rhs(s + h, y + h * k3);
    Vec next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!next.allFinite()) {
      throw Error(ErrorCode::Blowup, "integration produced a non-finite state", s);
    }
    if (after_step) after_step(grid[to], next);
    out[to] = std::move(next);
  };
  for (std::size_t i = anchor; i + 1 < grid.size(); ++i) step(i, i + 1);
  for (std::size_t i = anchor; i > 0; --i) step(i, i - 1);
  return VectorSeries(grid, std::move(out));
}

// ---------------------------------------------------------------- differentiation

ScalarSeries differentiate_series(const ScalarSeries& x) {
  const Grid& g = x.grid;
  require_stencil(g);
  const auto nodes = g.nodes();
  std::vector<double> d(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t j0 = stencil_start(i, g.size());
    const auto w = derivative_weights(nodes.data() + j0, nodes[i]);
    double acc = 0.0;
    for (std::size_t k = 0; k < kStencil; ++k) acc += w[k] * x.values[j0 + k];
    d[i] = acc;
  }
  return ScalarSeries(g, std::move(d));
}

VectorSeries differentiate_series(const VectorSeries& x) {
  const Grid& g = x.grid;
  require_stencil(g);
  const auto nodes = g.nodes();
  std::vector<Vec> d(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t j0 = stencil_start(i, g.size());
    const auto w = derivative_weights(nodes.data() + j0, nodes[i]);
    Vec acc = Vec::Zero(x.values[j0].size());
    for (std::size_t k = 0; k < kStencil; ++k) acc += w[k] * x.values[j0 + k];
    d[i] = std::move(acc);
  }
  return VectorSeries(g, std::move(d));
}

ScalarSeries derivative_of(const ScalarSeries& x) {
  if (x.exact_derivative) return ScalarSeries(x.grid, *x.exact_derivative);
  return differentiate_series(x);
}

// ---------------------------------------------------------------- quadrature

ScalarSeries cumulative_integral(const ScalarSeries& x, double anchor_s, double anchor_value) {
  const Grid& g = x.grid;
  if (!g.contains(anchor_s)) {
    throw Error(ErrorCode::Domain, "integration anchor lies outside the grid", anchor_s);
  }
  const auto nodes = g.nodes();
  const std::size_t n = g.size();
  std::vector<double> acc(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t j0 = cubic_start(i, n);
    acc[i + 1] = acc[i] + cubic_segment_integral(nodes.data() + j0, x.values.data() + j0, nodes[i], nodes[i + 1]);
  }
  // Value of the running integral at the anchor, integrating the partial interval.
  const std::size_t k = g.interval(anchor_s);
  const std::size_t j0 = cubic_start(k, n);
  const double at_anchor =
      acc[k] + cubic_segment_integral(nodes.data() + j0, x.values.data() + j0, nodes[k], anchor_s);
  const double shift = anchor_value - at_anchor;
  for (double& v : acc) v += shift;
  return ScalarSeries(g, std::move(acc), x.values);
}

// ---------------------------------------------------------------- interpolation

double interpolate(const Grid& grid, std::span<const double> values, double s) {
  const std::size_t n = grid.size();
  const std::size_t j0 = cubic_start(grid.interval(s), n);
  double p = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    double l = 1.0;
    for (std::size_t j = 0; j < 4; ++j) {
      if (j != k) l *= (s - grid[j0 + j]) / (grid[j0 + k] - grid[j0 + j]);
    }
    p += values[j0 + k] * l;
  }
  return p;
}

double interpolate(const ScalarSeries& x, double s) { return interpolate(x.grid, x.values, s); }

Vec interpolate(const VectorSeries& x, double s) {
  const Grid& grid = x.grid;
  const std::size_t j0 = cubic_start(grid.interval(s), grid.size());
  Vec p = Vec::Zero(x.values[j0].size());
  for (std::size_t k = 0; k < 4; ++k) {
    double l = 1.0;
    for (std::size_t j = 0; j < 4; ++j) {
      if (j != k) l *= (s - grid[j0 + j]) / (grid[j0 + k] - grid[j0 + j]);
    }
    p += l * x.values[j0 + k];
  }
  return p;
}

// ---------------------------------------------------------------- least squares

LinearFit fit_linear_basis(std::span<const ScalarSeries> basis, const ScalarSeries& target) {
  if (basis.empty()) throw Error(ErrorCode::Input, "fit needs at least one basis series");
  const std::size_t n = target.size();
  const std::size_t k = basis.size();
  Eigen::MatrixXd a(n, k);
  Eigen::VectorXd b(n);
  for (std::size_t j = 0; j < k; ++j) {
    if (!(basis[j].grid == target.grid)) throw Error(ErrorCode::Input, "basis grid differs from target grid");
    for (std::size_t i = 0; i < n; ++i) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = basis[j][i];
  }
  for (std::size_t i = 0; i < n; ++i) b(static_cast<Eigen::Index>(i)) = target[i];

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < static_cast<Eigen::Index>(k)) {
    throw Error(ErrorCode::DegenerateFit, "basis is rank deficient on this grid");
  }
  const Eigen::VectorXd c = qr.solve(b);
  const Eigen::VectorXd r = a * c - b;

  LinearFit fit;
  fit.coefficients.assign(c.data(), c.data() + c.size());
  fit.rms = std::sqrt(r.squaredNorm() / static_cast<double>(n));
  return fit;
}

// ---------------------------------------------------------------- helpers

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double rms(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc / static_cast<double>(v.size()));
}

std::vector<double> difference(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::Input, "series lengths differ");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

// ---------------------------------------------------------------- errors

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Usage: return "usage";
    case ErrorCode::Input: return "input";
    case ErrorCode::Size: return "size";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::Blowup: return "integration-blowup";
    case ErrorCode::Regularity: return "regularity";
    case ErrorCode::DegenerateCurve: return "degenerate-curve";
    case ErrorCode::DegenerateFit: return "degenerate-fit";
    case ErrorCode::NearOrthogonal: return "near-orthogonal";
    case ErrorCode::TorsionVanishing: return "torsion-vanishing";
    case ErrorCode::ParallelCase: return "parallel-case";
    case ErrorCode::Infeasible: return "infeasible";
    case ErrorCode::Integration: return "integration";
  }
  return "unknown";
}

namespace {
std::string with_location(ErrorCode code, const std::string& message, std::optional<double> where) {
  std::ostringstream out;
  out << to_string(code) << " error: " << message;
  if (where) out << " (at s = " << *where << ")";
  return out.str();
}
}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<double> where)
    : std::runtime_error(with_location(code, message, where)), code_(code), where_(where) {}

bool Error::numerical() const noexcept {
  switch (code_) {
    case ErrorCode::Usage:
    case ErrorCode::Input:
    case ErrorCode::Size:
    case ErrorCode::Unsupported:
      return false;
    default:
      return true;
  }
}

}  // namespace pacurves
