#pragma once

#include "gradedrt/dualnorm.hpp"
#include "gradedrt/rt.hpp"

#include <Eigen/Dense>

#include <iosfwd>

namespace gradedrt {

/// Assembled matrices of the per-face mixed problem in RT0 x P0.
struct MixedSystem {
  const GradedMesh* mesh = nullptr;
  Eigen::MatrixXd mass;        // edges x edges, SPD
  Eigen::MatrixXd div_coupling;  // elements x edges: (div v_e) integrated = sign
  Eigen::VectorXd areas;       // element areas (mean-zero constraint weights)
  std::vector<int> boundary_edges;
  std::vector<int> interior_edges;
};

MixedSystem assemble_mixed_system(const GradedMesh& mesh);

/// (z_h, f_h) of the constrained saddle-point projection: boundary fluxes of
/// z_h are pinned to the RT interpolant of u, f_h has zero mean.
struct MixedSolution {
  RtFunction z;
  Eigen::VectorXd f;       // one value per element, (f, 1) = 0
  double residual = 0.0;   // relative residual of the two discrete equations
  double multiplier = 0.0; // mean-zero Lagrange multiplier (should be ~0)
  double condition_estimate = 0.0;
};

MixedSolution solve_qh(const VectorField& u, const GradedMesh& mesh,
                       const QuadOptions& opts = {.order = 10});

/// Discrete inf-sup constant of the divergence coupling: smallest singular
/// value of the scaled coupling over mean-zero P0 against interior-flux RT0
/// in H(div). Returns +inf when the constrained space is trivial.
double inf_sup_constant(const GradedMesh& mesh);
/// Independent route: dense SVD of the scaled coupling matrix.
double inf_sup_constant_svd_oracle(const GradedMesh& mesh);

struct QhErrorRow {
  double h = 0;
  double dual_error = 0;    // ||u - z_h|| in the discrete dual surrogate
  double hdiv_error = 0;    // ||u - Pi_RT u||_{H(div)}
  double ratio = 0;
};
struct QhErrorReport {
  std::vector<QhErrorRow> rows;
  double fitted_slope = 0;  // slope of log ratio vs log h
  double r2 = 0;
};

/// Per-mesh table of dual-norm error of Q_h against the H(div) interpolation
/// error, with the fitted log-log slope of their ratio.
QhErrorReport qh_error_report(const VectorField& u,
                              const std::vector<GradedMesh>& meshes,
                              const DualSpace& dual,
                              const QuadOptions& opts = {.order = 10});

/// ||u - f||_{H(div)} = sqrt(L2 error^2 + ||div u - div_h f||_0^2).
double hdiv_error(const VectorField& u, const RtFunction& f, const GradedMesh& mesh,
                  const QuadOptions& opts = {.order = 10});

/// Coordinate-format text dump (row col value), 0-based indices.
void write_matrix_coordinate(std::ostream& os, const Eigen::MatrixXd& m,
                             const std::string& name);

}  // namespace gradedrt
