#include "gradedrt/mixed.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace gradedrt {

MixedSystem assemble_mixed_system(const GradedMesh& mesh) {
  if (!is_conforming(mesh))
    throw std::invalid_argument("assemble_mixed_system: non-conforming mesh");
  MixedSystem sys;
  sys.mesh = &mesh;
  int ne = int(mesh.edges.size());
  int nk = int(mesh.elements.size());
  sys.mass = Eigen::MatrixXd::Zero(ne, ne);
  sys.div_coupling = Eigen::MatrixXd::Zero(nk, ne);
  sys.areas.resize(nk);

  const GaussRule& g = gauss_rule(4);
  for (int k = 0; k < nk; ++k) {
    const Element& el = mesh.elements[k];
    sys.areas[k] = mesh.element_area(k);
    int nloc = el.nedges();
    // local mass: (1/J) int_ref (A phi_i) . (A phi_j)
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nloc, nloc);
    double jac = el.map.jacobian();
    auto accumulate = [&](const Vec2& xr, double w) {
      Vec2 vals[4];
      for (int i = 0; i < nloc; ++i) vals[i] = el.map.a * rt_basis(el.kind, i, xr);
      for (int i = 0; i < nloc; ++i)
        for (int j = i; j < nloc; ++j) local(i, j) += w * vals[i].dot(vals[j]);
    };
    if (el.kind == CellKind::Quad) {
      for (std::size_t i = 0; i < g.x.size(); ++i)
        for (std::size_t j = 0; j < g.x.size(); ++j)
          accumulate(Vec2(g.x[i], g.x[j]), g.w[i] * g.w[j]);
    } else {
      for (std::size_t i = 0; i < g.x.size(); ++i)
        for (std::size_t j = 0; j < g.x.size(); ++j) {
          double u = g.x[i], v = g.x[j];
          accumulate(Vec2(u, u * v), g.w[i] * g.w[j] * u);
        }
    }
    local /= jac;
    for (int i = 0; i < nloc; ++i)
      for (int j = 0; j < nloc; ++j) {
        double v = (j >= i ? local(i, j) : local(j, i));
        sys.mass(el.edge[i], el.edge[j]) += el.esign[i] * el.esign[j] * v;
      }
    // divergence coupling: int_K div v_e = outward flux = sign
    for (int i = 0; i < nloc; ++i) sys.div_coupling(k, el.edge[i]) += el.esign[i];
  }

  for (int e = 0; e < ne; ++e)
    (mesh.edges[e].boundary() ? sys.boundary_edges : sys.interior_edges).push_back(e);
  return sys;
}

namespace {

Eigen::VectorXd rhs_loads(const MixedSystem& sys, const VectorField& u,
                          const QuadOptions& opts) {
  const GradedMesh& mesh = *sys.mesh;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.edges.size());
  for (std::size_t k = 0; k < mesh.elements.size(); ++k) {
    const Element& el = mesh.elements[k];
    Mat2 inv = el.map.a.inverse();
    double jac = el.map.jacobian();
    int nloc = el.nedges();
    for (int i = 0; i < nloc; ++i) {
      double val = integrate_element(
          mesh, int(k),
          [&](const Vec2& x) {
            Vec2 xr = inv * (x - el.map.b);
            Vec2 phi = el.map.a * rt_basis(el.kind, i, xr) / jac;
            return u.u1(x) * phi.x() + u.u2(x) * phi.y();
          },
          u.singular, opts);
      b[el.edge[i]] += el.esign[i] * val;
    }
  }
  return b;
}

}  // namespace

MixedSolution solve_qh(const VectorField& u, const GradedMesh& mesh,
                       const QuadOptions& opts) {
  if (!u.has_div())
    throw std::invalid_argument("solve_qh: field needs an analytic divergence");
  MixedSystem sys = assemble_mixed_system(mesh);
  const int nI = int(sys.interior_edges.size());
  const int nK = int(mesh.elements.size());

  // boundary data: z . n = Pi_RT u . n, i.e. prescribed edge fluxes
  QuadStatus st;
  RtFunction zfull;
  zfull.mesh = &mesh;
  zfull.coef = Eigen::VectorXd::Zero(mesh.edges.size());
  for (int e : sys.boundary_edges) {
    const Edge& ed = mesh.edges[e];
    zfull.coef[e] = edge_flux(u, mesh.vertices[ed.v0], mesh.vertices[ed.v1],
                              mesh.edge_normal(e), opts, &st);
  }

  // element data d_K = int_K div u
  Eigen::VectorXd d(nK);
  for (int k = 0; k < nK; ++k)
    d[k] = integrate_element(mesh, k, [&](const Vec2& x) { return u.div(x); },
                             u.singular, opts);

  Eigen::VectorXd b = rhs_loads(sys, u, opts);

  // saddle system on (z_I, f, lambda)
  int n = nI + nK + 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < nI; ++i) {
    int ei = sys.interior_edges[i];
    for (int j = 0; j < nI; ++j) a(i, j) = sys.mass(ei, sys.interior_edges[j]);
    for (int k = 0; k < nK; ++k) {
      a(i, nI + k) = sys.div_coupling(k, ei);
      a(nI + k, i) = sys.div_coupling(k, ei);
    }
    double bc = 0;
    for (int e : sys.boundary_edges) bc += sys.mass(ei, e) * zfull.coef[e];
    rhs[i] = b[ei] - bc;
  }
  for (int k = 0; k < nK; ++k) {
    a(nI + k, nI + nK) = sys.areas[k];
    a(nI + nK, nI + k) = sys.areas[k];
    double bc = 0;
    for (int e : sys.boundary_edges) bc += sys.div_coupling(k, e) * zfull.coef[e];
    rhs[nI + k] = d[k] - bc;
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  Eigen::VectorXd x = lu.solve(rhs);
  double relres = (a * x - rhs).norm() / std::max(rhs.norm(), 1e-300);
  if (!x.allFinite())
    throw std::runtime_error("solve_qh: singular saddle system (inf-sup failure?)");

  MixedSolution sol;
  sol.z = zfull;
  for (int i = 0; i < nI; ++i) sol.z.coef[sys.interior_edges[i]] = x[i];
  sol.f = x.segment(nI, nK);
  sol.multiplier = x[n - 1];
  sol.residual = relres;
  sol.condition_estimate = a.norm() * lu.inverse().norm();
  return sol;
}

namespace {

// Schur-type operator of the scaled coupling restricted to mean-zero P0:
// C (M + D)^-1 C^T with C = N^(-1/2) B_I, returning its eigen/svd data.
struct InfSupOperator {
  bool trivial = true;
  Eigen::MatrixXd c;        // nK x nI, scaled coupling
  Eigen::MatrixXd hdiv;     // nI x nI, M + D on interior edges
  Eigen::VectorXd n0;       // unit vector spanning the constants
};

InfSupOperator infsup_operator(const GradedMesh& mesh) {
  MixedSystem sys = assemble_mixed_system(mesh);
  InfSupOperator op;
  int nI = int(sys.interior_edges.size());
  int nK = int(mesh.elements.size());
  if (nI == 0 || nK <= 1) return op;
  op.trivial = false;

  Eigen::MatrixXd mII(nI, nI), bI(nK, nI);
  for (int i = 0; i < nI; ++i) {
    for (int j = 0; j < nI; ++j)
      mII(i, j) = sys.mass(sys.interior_edges[i], sys.interior_edges[j]);
    for (int k = 0; k < nK; ++k) bI(k, i) = sys.div_coupling(k, sys.interior_edges[i]);
  }
  // (div v, div w) = sum_K (Bv)_K (Bw)_K / |K|
  Eigen::MatrixXd d = bI.transpose() * sys.areas.cwiseInverse().asDiagonal() * bI;
  op.hdiv = mII + d;
  op.c = sys.areas.cwiseSqrt().cwiseInverse().asDiagonal() * bI;
  op.n0 = sys.areas.cwiseSqrt();
  op.n0.normalize();
  return op;
}

}  // namespace

double inf_sup_constant(const GradedMesh& mesh) {
  InfSupOperator op = infsup_operator(mesh);
  if (op.trivial) return std::numeric_limits<double>::infinity();
  Eigen::LLT<Eigen::MatrixXd> llt(op.hdiv);
  Eigen::MatrixXd s = op.c * llt.solve(op.c.transpose());
  // project out the constants direction
  Eigen::MatrixXd p =
      Eigen::MatrixXd::Identity(s.rows(), s.cols()) - op.n0 * op.n0.transpose();
  Eigen::MatrixXd ps = p * s * p;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (ps + ps.transpose()));
  // smallest eigenvalue on the complement of n0 (skip the deflated zero)
  Eigen::VectorXd evals = eig.eigenvalues();
  Eigen::MatrixXd evecs = eig.eigenvectors();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < evals.size(); ++i) {
    if (std::abs(evecs.col(i).dot(op.n0)) > 0.9) continue;  // constants direction
    best = std::min(best, evals[i]);
  }
  return std::sqrt(std::max(best, 0.0));
}

double inf_sup_constant_svd_oracle(const GradedMesh& mesh) {
  InfSupOperator op = infsup_operator(mesh);
  if (op.trivial) return std::numeric_limits<double>::infinity();
  // gamma = min over mean-zero g of ||L^-1 C^T g|| / ||g||, hdiv = L L^T
  Eigen::LLT<Eigen::MatrixXd> llt(op.hdiv);
  Eigen::MatrixXd l = llt.matrixL();
  Eigen::MatrixXd g =
      l.triangularView<Eigen::Lower>().solve(op.c.transpose());  // nI x nK
  // deflate constants: columns restricted to complement of n0
  Eigen::MatrixXd p =
      Eigen::MatrixXd::Identity(g.cols(), g.cols()) - op.n0 * op.n0.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g * p, Eigen::ComputeThinV);
  Eigen::VectorXd sv = svd.singularValues();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < sv.size(); ++i) {
    Eigen::VectorXd v = svd.matrixV().col(i);
    if (std::abs(v.dot(op.n0)) > 0.9) continue;
    best = std::min(best, sv[i]);
  }
  return best;
}

double hdiv_error(const VectorField& u, const RtFunction& f, const GradedMesh& mesh,
                  const QuadOptions& opts) {
  if (!u.has_div())
    throw std::invalid_argument("hdiv_error: field needs an analytic divergence");
  double l2 = l2_error(u, f, mesh, opts);
  double divsum = 0;
  for (std::size_t k = 0; k < mesh.elements.size(); ++k) {
    double dh = f.div_on(int(k));
    divsum += integrate_element(
        mesh, int(k),
        [&](const Vec2& x) {
          double dd = u.div(x) - dh;
          return dd * dd;
        },
        u.singular, opts);
  }
  return std::sqrt(l2 * l2 + std::max(divsum, 0.0));
}

namespace {

void fit_loglog(const std::vector<double>& x, const std::vector<double>& y,
                double* slope, double* r2) {
  int n = int(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  double den = n * sxx - sx * sx;
  *slope = (n * sxy - sx * sy) / den;
  double ss_res = syy - sy * sy / n - *slope * (sxy - sx * sy / n);
  double ss_tot = syy - sy * sy / n;
  *r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
}

}  // namespace

QhErrorReport qh_error_report(const VectorField& u,
                              const std::vector<GradedMesh>& meshes,
                              const DualSpace& dual, const QuadOptions& opts) {
  QhErrorReport rep;
  std::vector<double> hs, ratios;
  for (const auto& mesh : meshes) {
    MixedSolution sol = solve_qh(u, mesh, opts);
    RtFunction pi = interpolate_rt(u, mesh, opts);
    QhErrorRow row;
    row.h = mesh.grading.mesh_parameter();
    row.dual_error = dual.dual_norm_vector_error(u, sol.z);
    row.hdiv_error = hdiv_error(u, pi, mesh, opts);
    row.ratio = row.hdiv_error > 0 ? row.dual_error / row.hdiv_error : 0.0;
    rep.rows.push_back(row);
    if (row.ratio > 0) {
      hs.push_back(row.h);
      ratios.push_back(row.ratio);
    }
  }
  if (hs.size() >= 3) fit_loglog(hs, ratios, &rep.fitted_slope, &rep.r2);
  return rep;
}

void write_matrix_coordinate(std::ostream& os, const Eigen::MatrixXd& m,
                             const std::string& name) {
  char buf[64];
  os << "# matrix " << name << " " << m.rows() << " " << m.cols() << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) == 0.0) continue;
      std::snprintf(buf, sizeof buf, "%lld %lld %.17g\n",
                    static_cast<long long>(i), static_cast<long long>(j), m(i, j));
      os << buf;
    }
}

}  // namespace gradedrt
