#pragma once

#include "gradedrt/geometry.hpp"

#include <functional>
#include <span>
#include <vector>

namespace gradedrt {

/// Gauss-Legendre rule on [0,1]; cached per order.
struct GaussRule {
  std::vector<double> x, w;
};
const GaussRule& gauss_rule(int order);

/// Outcome of an adaptive/checked quadrature.
struct QuadStatus {
  bool converged = true;
  double est_error = 0.0;  // abs difference between the two check levels

  void merge(const QuadStatus& o) {
    converged = converged && o.converged;
    est_error = std::max(est_error, o.est_error);
  }
};

struct QuadOptions {
  int order = 8;         // Gauss order per panel
  double split_ratio = 0.25;
  int split_levels = 40;
  double rel_tol = 1e-8;  // convergence check tolerance
};

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(const Vec2&)>;

/// Sorted interior cut points for panelized 1D integration.
class Panelization {
 public:
  void add_cut(double x) { cuts_.push_back(x); }
  /// Geometric cluster of cuts accumulating toward `target` (an endpoint or
  /// interior point of [a,b]).
  void add_geometric(double a, double b, double target, double ratio, int levels);
  std::vector<double> build(double a, double b) const;

 private:
  std::vector<double> cuts_;
};

/// Panelized Gauss integration of f over [a,b].
double integrate_panels(const Fn1& f, double a, double b,
                        std::span<const double> cuts, int order);

/// Convenience: integrate with geometric refinement toward the given points.
double integrate_graded(const Fn1& f, double a, double b,
                        std::span<const double> graded_points,
                        const QuadOptions& opts);

/// Degree-5 rule on a triangle (7 points); returns sum w_i f(p_i) * area.
double integrate_triangle(const Fn2& f, const Vec2& a, const Vec2& b, const Vec2& c,
                          int order);

/// Integration over a convex polygon by centroid fan.
double integrate_polygon(const Fn2& f, const ConvexPoly& poly, int order);

/// 2D tensor Gauss over an axis-aligned rectangle with optional graded cuts
/// per axis (each entry is a coordinate toward which panels accumulate).
double integrate_rect(const Fn2& f, const Vec2& lo, const Vec2& hi,
                      std::span<const double> graded_x,
                      std::span<const double> graded_y,
                      const QuadOptions& opts);

}  // namespace gradedrt
