#pragma once

#include "gradedrt/fields.hpp"
#include "gradedrt/mesh.hpp"
#include "gradedrt/rt.hpp"

#include <optional>

namespace gradedrt {

/// Result of a fractional/anisotropic seminorm quadrature. `value` is the
/// seminorm (not squared); `est_rel_error` compares the two finest
/// quadrature levels.
struct SeminormValue {
  double value = 0.0;
  double est_rel_error = 0.0;
  bool converged = true;
  double s = 0.5;
  int axis = 0;  // 0 for isotropic
  std::string region_id;
};

/// Axis-aligned rectangle or the right triangle with vertices
/// origin, origin + (h1, 0), origin + (h1, h2). The unit square and the
/// reference triangle are Rect/Tri with origin 0 and h1 = h2 = 1.
struct Region {
  enum class Kind { Rect, Tri } kind = Kind::Rect;
  Vec2 origin = Vec2::Zero();
  double h1 = 1.0, h2 = 1.0;

  static Region unit_square() { return {Kind::Rect, Vec2::Zero(), 1.0, 1.0}; }
  static Region unit_triangle() { return {Kind::Tri, Vec2::Zero(), 1.0, 1.0}; }
  double area() const { return kind == Kind::Rect ? h1 * h2 : 0.5 * h1 * h2; }
  double diameter() const { return std::hypot(h1, h2); }
  ConvexPoly polygon() const;
  std::string id() const;
};

/// Controls the panel-pair quadrature. level bumps panel counts/orders for
/// the built-in two-level convergence check.
struct SeminormOptions {
  int level = 1;
  double nonconv_tol = 0.05;  // flag when levels disagree beyond this
};

/// 1D Slobodeckij seminorm squared of g on (a,b):
///   int int |g(x)-g(y)|^2 / |x-y|^(1+2s) dx dy,
/// by the difference representation (outer variable v = x - y, geometric
/// panels toward v = 0). `graded` lists coordinates of integrable
/// singularities of g inside [a,b].
double slobodeckij_1d_sq(const Fn1& g, double a, double b, double s,
                         std::span<const double> graded, int level);

/// 2D Slobodeckij seminorm of g over the region (kernel |x-y|^-(2+2s)).
SeminormValue fractional_seminorm(const ScalarField& g, const Region& region,
                                  double s, const SeminormOptions& opts = {});

/// Anisotropic seminorm: outer integral over lines in direction `axis`
/// (1 or 2) of 1D H^s seminorms; on Tri the inner interval follows the
/// hypotenuse as in the anisotropic-element scalings.
SeminormValue anisotropic_seminorm(const ScalarField& g, const Region& region,
                                   double s, int axis,
                                   const SeminormOptions& opts = {});

/// L2 norm of g over the region.
double l2_norm(const ScalarField& g, const Region& region, int order = 10);

/// Full H^s norm: sqrt(L2^2 + fractional^2).
double hs_norm(const ScalarField& g, const Region& region, double s,
               const SeminormOptions& opts = {});

/// || u - f ||_L2 over the mesh (element-wise Gauss with singular splits).
double l2_error(const VectorField& u, const RtFunction& f, const GradedMesh& mesh,
                const QuadOptions& opts = {.order = 10});
/// L2 norm of one component of an RtFunction.
double l2_norm_component(const RtFunction& f, int component);

struct NormEquivalenceReport {
  double lhs = 0, rhs = 0, ratio = 0;
};
/// ||g||_{H^s(Q)} vs ||g||_0 + |g|_{AH1^s} + |g|_{AH2^s} on the unit square.
NormEquivalenceReport norm_equivalence_report(const ScalarField& g, double s,
                                              const SeminormOptions& opts = {});

struct PiolaScalingReport {
  double l2_residual = 0;       // |lhs/rhs - 1| of the L2 identity
  double ah2_residual = 0;      // |lhs/rhs - 1| of the AH2 identity
  double h12_slack = 0;         // rhs_bound / lhs of the H^(1/2) inequality
  bool h12_holds = false;
};
/// Verifies the diagonal-scaling identities between the reference triangle
/// and the triangle scaled by diag(h1, h2), for the scalar profile g.
PiolaScalingReport piola_scaling_identity_check(double h1, double h2,
                                                const ScalarField& g,
                                                const SeminormOptions& opts = {});

}  // namespace gradedrt
