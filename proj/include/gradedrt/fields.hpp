#pragma once

#include "gradedrt/geometry.hpp"
#include "gradedrt/quadrature.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace gradedrt {

/// Line {coordinate[axis] == at} where a field is non-smooth; integrators
/// refine geometrically toward it.
struct SingularLine {
  int axis = 1;
  double at = 0.0;
};

/// Profile w(t) = min{1, eps * log log(e/t)} and the weighted integrals that
/// cannot be evaluated by plain quadrature: the kink radius
/// rstar = exp(1 - exp(1/eps)) underflows double precision already for
/// eps <= 0.1, so w'-weighted integrals are computed after the exact
/// substitution tau = log(1 - log t), under which w' dt = -eps dtau.
struct LogLogProfile {
  double eps;
  double big_s;   // exp(1/eps)
  double rstar;   // exp(1 - big_s); 0 after underflow

  explicit LogLogProfile(double e);

  double w(double t) const;
  double dw(double t) const;  // 0 on [0, rstar]
  double tau_of(double t) const { return std::log(1.0 - std::log(t)); }
  double t_of_tau(double tau) const { return std::exp(1.0 - std::exp(tau)); }

  /// integral of g(t) w'(t) dt over (a,b), 0 <= a < b <= 1.
  double integrate_g_dw(const Fn1& g, double a, double b) const;
  /// integral of g(t) w'(t)^2 dt over (a,b); +inf when it overflows.
  double integrate_g_dw2(const Fn1& g, double a, double b) const;
  /// cut points making (w - 1) and w smooth per panel on (a,b).
  std::vector<double> panel_cuts(double a, double b) const;
};

/// Analytic tangential vector field on a 2D reference domain or face chart.
struct VectorField {
  std::function<double(const Vec2&)> u1, u2;
  std::function<double(const Vec2&)> div;  // empty if unknown
  std::vector<SingularLine> singular;
  std::shared_ptr<const LogLogProfile> profile;  // set for the min/loglog family
  double regularity_s = 1.0;                     // reporting tag only
  std::string name;

  bool has_div() const { return bool(div); }
  Vec2 operator()(const Vec2& x) const { return {u1(x), u2(x)}; }
};

struct ScalarField {
  std::function<double(const Vec2&)> eval;
  std::vector<SingularLine> singular;
  std::string name;
};

// Built-in families.
VectorField make_affine_rt(double a, double b, double c);     // (a + c x1, b + c x2)
VectorField make_rt_square(double a, double b, double c, double d);
VectorField make_trig();            // (sin(pi x1)cos(pi x2), cos(pi x1)sin(pi x2))
VectorField make_trig_divfree();    // (sin(pi x1)cos(pi x2), -cos(pi x1)sin(pi x2))
VectorField make_trig_mixed();      // (sin x1, cos x2)
VectorField make_poly_divfree();    // (x2^2, x1^2) style smooth div-free field
/// ((1+alpha) x2^alpha, 0); divergence-free, edge-singular at x2 = 0.
VectorField make_edge_singular(double alpha);
/// (x2^alpha, x1^alpha) scaled; divergence-free, both components active.
VectorField make_corner_singular(double alpha);
/// u^eps = ((1 - x1) w'(x2), w(x2)) with the log-log profile above.
VectorField make_counterexample(double eps);

ScalarField make_scalar_const(double c);
ScalarField make_scalar_coord(int axis);         // x1 or x2
ScalarField make_scalar_x1x2();
ScalarField make_scalar_power(double alpha);     // x2^alpha
ScalarField make_scalar_power_div(double alpha); // alpha(1+alpha) x2^(alpha-1)
/// Deterministic random polynomial of total degree <= 3 (fixed seed stream).
ScalarField make_scalar_poly_random(unsigned seed);

}  // namespace gradedrt
