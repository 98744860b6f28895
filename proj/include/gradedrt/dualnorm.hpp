#pragma once

#include "gradedrt/seminorms.hpp"

#include <Eigen/Cholesky>

namespace gradedrt {

struct DualNormSpec {
  int m = 4;  // dyadic refinements of the region; s = 1/2 fixed
  int level = 1;
};

/// Discrete surrogate of the H^(-1/2) dual norm: sup over a fine continuous
/// P1 space V_m of (f, v) / ||v||_{H^(1/2)}, evaluated as sqrt(F^T G^-1 F)
/// with G the Gram matrix of the L2 + Slobodeckij inner product.
class DualSpace {
 public:
  DualSpace(const Region& region, const DualNormSpec& spec);

  int node_count() const { return int(nodes_.size()); }
  const Region& region() const { return region_; }

  double dual_norm(const Eigen::VectorXd& load) const;
  Eigen::VectorXd load_scalar(const ScalarField& f) const;
  Eigen::VectorXd load_pwconst(const GradedMesh& mesh,
                               const std::vector<double>& values) const;
  /// loads of the two components of (u - z) on the RT mesh of z
  std::array<Eigen::VectorXd, 2> load_vector_error(const VectorField& u,
                                                   const RtFunction& z) const;

  double dual_norm_scalar(const ScalarField& f) const {
    return dual_norm(load_scalar(f));
  }
  /// componentwise: sqrt(||u1 - z1||^2 + ||u2 - z2||^2) in the surrogate norm
  double dual_norm_vector_error(const VectorField& u, const RtFunction& z) const;

 private:
  Region region_;
  DualNormSpec spec_;
  std::vector<Vec2> nodes_;
  std::vector<std::array<int, 3>> tris_;
  Eigen::MatrixXd gram_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;

  void assemble();
};

/// One-shot convenience wrapper.
double discrete_dual_half_norm(const ScalarField& f, const Region& region,
                               const DualNormSpec& spec = {});

}  // namespace gradedrt
