#pragma once

#include "gradedrt/fields.hpp"
#include "gradedrt/mesh.hpp"
#include "gradedrt/quadrature.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <span>

namespace gradedrt {

/// Lowest-order Raviart-Thomas basis on the reference element; DOFs are the
/// outward edge-normal fluxes, basis i has unit flux across local edge i.
Vec2 rt_basis(CellKind kind, int i, const Vec2& xr);

/// Integral of u . n over the segment p -> q against the given unit normal.
/// For fields carrying a LogLogProfile the w'-weighted part is computed via
/// the exact substitution from LogLogProfile; everything else is panelized
/// Gauss with geometric refinement toward declared singular lines.
double edge_flux(const VectorField& u, const Vec2& p, const Vec2& q, const Vec2& n,
                 const QuadOptions& opts = {}, QuadStatus* status = nullptr);

/// Coefficient vector over global oriented edges of RT0 on a GradedMesh.
struct RtFunction {
  const GradedMesh* mesh = nullptr;
  Eigen::VectorXd coef;  // flux against the global edge normal

  /// Outward flux of local edge `le` of element `k`.
  double outward_flux(int k, int le) const {
    const Element& el = mesh->elements[k];
    return el.esign[le] * coef[el.edge[le]];
  }
  /// Local reference-element coefficients (a, b, c, d) of
  /// (a + c x1, b + d x2); for triangles d == c.
  Eigen::Vector4d local_coeffs(int k) const;
  /// Physical field value at reference point xr of element k.
  Vec2 eval_local(int k, const Vec2& xr) const;
  /// Constant element divergence (sum of outward fluxes / area).
  double div_on(int k) const;
};

RtFunction interpolate_rt(const VectorField& u, const GradedMesh& mesh,
                          const QuadOptions& opts = {}, QuadStatus* status = nullptr);

/// Value at the physical image of reference point xr; throws when xr lies
/// outside the reference element.
Vec2 eval_rt(const RtFunction& f, int element, const Vec2& xr);
double div_rt(const RtFunction& f, int element);

/// Integral of f over element k, honoring declared singular lines.
double integrate_element(const GradedMesh& mesh, int k, const Fn2& f_phys,
                         std::span<const SingularLine> singular,
                         const QuadOptions& opts);

/// Per-element means of g (the piecewise-constant L2 projection).
std::vector<double> project_piecewise_constant(const ScalarField& g,
                                               const GradedMesh& mesh,
                                               const QuadOptions& opts = {});

/// max over elements of |div(Pi_RT u) - Pi_0(div u)|; requires analytic div.
double commuting_defect(const VectorField& u, const GradedMesh& mesh,
                        const QuadOptions& opts = {});

void write_rt(std::ostream& os, const RtFunction& f);

}  // namespace gradedrt
