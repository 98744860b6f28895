#include "gradedrt/dualnorm.hpp"

#include <cmath>
#include <stdexcept>

namespace gradedrt {

namespace {

struct TriQuad {
  std::array<Vec2, 7> pts;
  std::array<double, 7> w;  // includes the area factor
};

TriQuad tri_quad(const Vec2& a, const Vec2& b, const Vec2& c) {
  static const double w1 = 0.225, w2 = 0.1323941527885062, w3 = 0.1259391805448271;
  static const double a2 = 0.0597158717897698, b2 = 0.4701420641051151;
  static const double a3 = 0.7974269853530873, b3 = 0.1012865073234563;
  static const double L[7][3] = {{1.0 / 3, 1.0 / 3, 1.0 / 3}, {a2, b2, b2},
                                 {b2, a2, b2},               {b2, b2, a2},
                                 {a3, b3, b3},               {b3, a3, b3},
                                 {b3, b3, a3}};
  static const double W[7] = {w1, w2, w2, w2, w3, w3, w3};
  TriQuad q;
  double area = 0.5 * cross2(b - a, c - a);
  for (int i = 0; i < 7; ++i) {
    q.pts[i] = L[i][0] * a + L[i][1] * b + L[i][2] * c;
    q.w[i] = W[i] * area;
  }
  return q;
}

// barycentric value of the hat function of vertex v on triangle (a,b,c)
double hat(const Vec2& x, const Vec2& v, const Vec2& p, const Vec2& q) {
  // linear function equal to 1 at v, 0 at p and q
  double den = cross2(p - v, q - v);
  return cross2(p - x, q - x) / den;
}

}  // namespace

DualSpace::DualSpace(const Region& region, const DualNormSpec& spec)
    : region_(region), spec_(spec) {
  if (spec.m < 1) throw std::invalid_argument("DualSpace: m must be >= 1");
  int n = 1 << spec.m;
  if (region.kind == Region::Kind::Rect) {
    auto id = [&](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i)
        nodes_.push_back(region.origin +
                         Vec2(region.h1 * i / n, region.h2 * j / n));
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        tris_.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
        tris_.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
      }
  } else {
    // lattice (i, j), j <= i on the triangle (0,0), (h1,0), (h1,h2)
    std::vector<int> row_start(n + 2, 0);
    for (int i = 0; i <= n; ++i) row_start[i + 1] = row_start[i] + i + 1;
    auto id = [&](int i, int j) { return row_start[i] + j; };
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= i; ++j)
        nodes_.push_back(region.origin +
                         Vec2(region.h1 * i / n, region.h2 * j / n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) {
        tris_.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
        if (j < i) tris_.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
      }
  }
  assemble();
}

void DualSpace::assemble() {
  int nn = node_count();
  int nt = int(tris_.size());
  gram_ = Eigen::MatrixXd::Zero(nn, nn);

  // L2 mass, exact
  for (const auto& t : tris_) {
    double area = 0.5 * cross2(nodes_[t[1]] - nodes_[t[0]], nodes_[t[2]] - nodes_[t[0]]);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        gram_(t[a], t[b]) += area / 12.0 * (a == b ? 2.0 : 1.0);
  }

  // Slobodeckij part, s = 1/2, kernel |x-y|^-3
  std::vector<TriQuad> tq(nt);
  for (int k = 0; k < nt; ++k)
    tq[k] = tri_quad(nodes_[tris_[k][0]], nodes_[tris_[k][1]], nodes_[tris_[k][2]]);

  auto nodes_of = [&](int k) { return tris_[k]; };
  auto shares_vertex = [&](int k1, int k2) {
    for (int a : nodes_of(k1))
      for (int b : nodes_of(k2))
        if (a == b) return true;
    return false;
  };

  // hat-function values at x for the 3 nodes of triangle k (0 outside role)
  auto hats_at = [&](int k, const Vec2& x, double out[3]) {
    const auto& t = tris_[k];
    out[0] = hat(x, nodes_[t[0]], nodes_[t[1]], nodes_[t[2]]);
    out[1] = hat(x, nodes_[t[1]], nodes_[t[2]], nodes_[t[0]]);
    out[2] = hat(x, nodes_[t[2]], nodes_[t[0]], nodes_[t[1]]);
  };

  // merged node list of a pair and per-triangle local indices
  struct PairNodes {
    int ids[6];
    int n;
    int loc1[3], loc2[3];
  };
  auto merge_nodes = [&](int k1, int k2, PairNodes& pn) {
    pn.n = 0;
    for (int a = 0; a < 3; ++a) {
      pn.ids[pn.n] = tris_[k1][a];
      pn.loc1[a] = pn.n++;
    }
    for (int b = 0; b < 3; ++b) {
      int id = tris_[k2][b];
      int found = -1;
      for (int i = 0; i < pn.n; ++i)
        if (pn.ids[i] == id) found = i;
      if (found < 0) {
        pn.ids[pn.n] = id;
        found = pn.n++;
      }
      pn.loc2[b] = found;
    }
  };

  double acc[6][6];
  PairNodes pn;
  for (int k1 = 0; k1 < nt; ++k1) {
    for (int k2 = k1; k2 < nt; ++k2) {
      bool near = shares_vertex(k1, k2);
      merge_nodes(k1, k2, pn);
      for (int a = 0; a < pn.n; ++a)
        for (int b = 0; b < pn.n; ++b) acc[a][b] = 0;

      if (!near) {
        // plain 4D tensor rule
        double h1v[3], h2v[3];
        for (int i = 0; i < 7; ++i) {
          const Vec2& x = tq[k1].pts[i];
          hats_at(k1, x, h1v);
          for (int j = 0; j < 7; ++j) {
            const Vec2& y = tq[k2].pts[j];
            hats_at(k2, y, h2v);
            double kern = tq[k1].w[i] * tq[k2].w[j] /
                          std::pow((x - y).squaredNorm(), 1.5);
            double dphi[6];
            for (int a = 0; a < pn.n; ++a) dphi[a] = 0;
            for (int a = 0; a < 3; ++a) dphi[pn.loc1[a]] += h1v[a];
            for (int b = 0; b < 3; ++b) dphi[pn.loc2[b]] -= h2v[b];
            for (int a = 0; a < pn.n; ++a)
              for (int b = a; b < pn.n; ++b)
                acc[a][b] += kern * dphi[a] * dphi[b];
          }
        }
      } else {
        // polar difference representation around d = 0
        ConvexPoly t2poly = ConvexPoly::triangle(
            nodes_[tris_[k2][0]], nodes_[tris_[k2][1]], nodes_[tris_[k2][2]]);
        ConvexPoly t1poly = ConvexPoly::triangle(
            nodes_[tris_[k1][0]], nodes_[tris_[k1][1]], nodes_[tris_[k1][2]]);
        double rho_max = 0;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            rho_max = std::max(
                rho_max, (nodes_[tris_[k1][a]] - nodes_[tris_[k2][b]]).norm());
        int theta_panels = 6, theta_order = 3, rho_levels = 24, rho_order = 3;
        bool identical = k1 == k2;
        double theta_lo = identical ? -M_PI_2 : -M_PI;
        double theta_hi = identical ? M_PI_2 : M_PI;
        double sym = identical ? 2.0 : 1.0;

        const GaussRule& gt = gauss_rule(theta_order);
        const GaussRule& gr = gauss_rule(rho_order);
        Panelization pr;
        pr.add_geometric(0, rho_max, 0.0, 0.5, rho_levels);
        auto rcuts = pr.build(0, rho_max);

        double h1v[3], h2v[3];
        for (int tp = 0; tp < theta_panels; ++tp) {
          double t0 = theta_lo + (theta_hi - theta_lo) * tp / theta_panels;
          double t1 = theta_lo + (theta_hi - theta_lo) * (tp + 1) / theta_panels;
          for (std::size_t it = 0; it < gt.x.size(); ++it) {
            double theta = t0 + (t1 - t0) * gt.x[it];
            double wt = gt.w[it] * (t1 - t0) * sym;
            Vec2 dir(std::cos(theta), std::sin(theta));
            double lo = 0;
            auto panel = [&](double p0, double p1) {
              for (std::size_t ir = 0; ir < gr.x.size(); ++ir) {
                double rho = p0 + (p1 - p0) * gr.x[ir];
                double wq_base = wt * gr.w[ir] * (p1 - p0) / (rho * rho);
                Vec2 d = rho * dir;
                ConvexPoly shifted = t2poly;
                for (int i = 0; i < shifted.n; ++i) shifted.v[i] += d;
                ConvexPoly ov = t1poly.clip(shifted);
                if (ov.n < 3) continue;
                Vec2 c = ov.centroid();
                for (int i = 0; i < ov.n; ++i) {
                  TriQuad q = tri_quad(c, ov.v[i], ov.v[(i + 1) % ov.n]);
                  for (int p = 0; p < 7; ++p) {
                    const Vec2& x = q.pts[p];
                    Vec2 y = x - d;
                    hats_at(k1, x, h1v);
                    hats_at(k2, y, h2v);
                    double dphi[6];
                    for (int a = 0; a < pn.n; ++a) dphi[a] = 0;
                    for (int a = 0; a < 3; ++a) dphi[pn.loc1[a]] += h1v[a];
                    for (int b = 0; b < 3; ++b) dphi[pn.loc2[b]] -= h2v[b];
                    double kern = wq_base * q.w[p];
                    for (int a = 0; a < pn.n; ++a)
                      for (int b2 = a; b2 < pn.n; ++b2)
                        acc[a][b2] += kern * dphi[a] * dphi[b2];
                  }
                }
              }
            };
            for (double cpt : rcuts) {
              panel(lo, cpt);
              lo = cpt;
            }
            panel(lo, rho_max);
            lo = 0;
          }
        }
      }

      double factor = (k1 == k2) ? 1.0 : 2.0;  // unordered pair appears twice
      for (int a = 0; a < pn.n; ++a)
        for (int b = a; b < pn.n; ++b) {
          double v = factor * acc[a][b];
          gram_(pn.ids[a], pn.ids[b]) += v;
          if (pn.ids[a] != pn.ids[b]) gram_(pn.ids[b], pn.ids[a]) += v;
        }
    }
  }

  gram_ = 0.5 * (gram_ + gram_.transpose()).eval();
  ldlt_.compute(gram_);
  if (ldlt_.info() != Eigen::Success)
    throw std::runtime_error("DualSpace: singular Gram matrix");
}

double DualSpace::dual_norm(const Eigen::VectorXd& load) const {
  Eigen::VectorXd x = ldlt_.solve(load);
  double v = load.dot(x);
  return std::sqrt(std::max(v, 0.0));
}

Eigen::VectorXd DualSpace::load_scalar(const ScalarField& f) const {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(node_count());
  for (const auto& t : tris_) {
    const Vec2 &a = nodes_[t[0]], &b = nodes_[t[1]], &c = nodes_[t[2]];
    // strip split toward singular lines when they cross this triangle
    auto piece = [&](const ConvexPoly& poly) {
      Vec2 ctr = poly.centroid();
      for (int i = 0; i < poly.n; ++i) {
        TriQuad q = tri_quad(ctr, poly.v[i], poly.v[(i + 1) % poly.n]);
        for (int p = 0; p < 7; ++p) {
          double fval = f.eval(q.pts[p]);
          load[t[0]] += q.w[p] * fval * hat(q.pts[p], a, b, c);
          load[t[1]] += q.w[p] * fval * hat(q.pts[p], b, c, a);
          load[t[2]] += q.w[p] * fval * hat(q.pts[p], c, a, b);
        }
      }
    };
    ConvexPoly tp = ConvexPoly::triangle(a, b, c);
    std::vector<double> cuts;
    for (const auto& s : f.singular) {
      double lo = std::min({a[s.axis], b[s.axis], c[s.axis]});
      double hi = std::max({a[s.axis], b[s.axis], c[s.axis]});
      if (s.at < lo || s.at > hi) continue;
      double span = hi - lo, step = span;
      for (int k = 0; k < 10; ++k) {
        step *= 0.5;
        for (double cc : {s.at - step, s.at + step})
          if (cc > lo && cc < hi) cuts.push_back(cc);
      }
      std::sort(cuts.begin(), cuts.end());
      Vec2 nrm = s.axis == 0 ? Vec2(1, 0) : Vec2(0, 1);
      double prev = -1e300;
      for (std::size_t i = 0; i <= cuts.size(); ++i) {
        double next = i < cuts.size() ? cuts[i] : 1e300;
        ConvexPoly pc = tp.clip_halfplane(nrm, next).clip_halfplane(-nrm, -prev);
        if (pc.n >= 3) piece(pc);
        prev = next;
      }
      break;  // one singular axis per field in practice
    }
    if (cuts.empty()) piece(tp);
  }
  return load;
}

Eigen::VectorXd DualSpace::load_pwconst(const GradedMesh& mesh,
                                        const std::vector<double>& values) const {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(node_count());
  for (std::size_t k = 0; k < mesh.elements.size(); ++k) {
    const Element& el = mesh.elements[k];
    ConvexPoly ep;
    for (int i = 0; i < el.nverts(); ++i) ep.push(mesh.vertices[el.v[i]]);
    for (const auto& t : tris_) {
      const Vec2 &a = nodes_[t[0]], &b = nodes_[t[1]], &c = nodes_[t[2]];
      ConvexPoly ov = ConvexPoly::triangle(a, b, c).clip(ep);
      if (ov.n < 3) continue;
      Vec2 ctr = ov.centroid();
      for (int i = 0; i < ov.n; ++i) {
        TriQuad q = tri_quad(ctr, ov.v[i], ov.v[(i + 1) % ov.n]);
        for (int p = 0; p < 7; ++p) {
          load[t[0]] += q.w[p] * values[k] * hat(q.pts[p], a, b, c);
          load[t[1]] += q.w[p] * values[k] * hat(q.pts[p], b, c, a);
          load[t[2]] += q.w[p] * values[k] * hat(q.pts[p], c, a, b);
        }
      }
    }
  }
  return load;
}

std::array<Eigen::VectorXd, 2> DualSpace::load_vector_error(
    const VectorField& u, const RtFunction& z) const {
  const GradedMesh& mesh = *z.mesh;
  std::array<Eigen::VectorXd, 2> loads{Eigen::VectorXd::Zero(node_count()),
                                       Eigen::VectorXd::Zero(node_count())};
  for (std::size_t k = 0; k < mesh.elements.size(); ++k) {
    const Element& el = mesh.elements[k];
    Mat2 inv = el.map.a.inverse();
    ConvexPoly ep;
    for (int i = 0; i < el.nverts(); ++i) ep.push(mesh.vertices[el.v[i]]);
    for (const auto& t : tris_) {
      const Vec2 &a = nodes_[t[0]], &b = nodes_[t[1]], &c = nodes_[t[2]];
      ConvexPoly ov = ConvexPoly::triangle(a, b, c).clip(ep);
      if (ov.n < 3 || std::abs(ov.area()) < 1e-300) continue;
      Vec2 ctr = ov.centroid();
      for (int i = 0; i < ov.n; ++i) {
        TriQuad q = tri_quad(ctr, ov.v[i], ov.v[(i + 1) % ov.n]);
        for (int p = 0; p < 7; ++p) {
          const Vec2& x = q.pts[p];
          Vec2 xr = inv * (x - el.map.b);
          Vec2 err = Vec2(u.u1(x), u.u2(x)) - z.eval_local(int(k), xr);
          double h0 = hat(x, a, b, c), h1 = hat(x, b, c, a), h2 = hat(x, c, a, b);
          for (int comp = 0; comp < 2; ++comp) {
            loads[comp][t[0]] += q.w[p] * err[comp] * h0;
            loads[comp][t[1]] += q.w[p] * err[comp] * h1;
            loads[comp][t[2]] += q.w[p] * err[comp] * h2;
          }
        }
      }
    }
  }
  return loads;
}

double DualSpace::dual_norm_vector_error(const VectorField& u,
                                         const RtFunction& z) const {
  auto loads = load_vector_error(u, z);
  double n1 = dual_norm(loads[0]);
  double n2 = dual_norm(loads[1]);
  return std::sqrt(n1 * n1 + n2 * n2);
}

double discrete_dual_half_norm(const ScalarField& f, const Region& region,
                               const DualNormSpec& spec) {
  DualSpace space(region, spec);
  return space.dual_norm_scalar(f);
}

}  // namespace gradedrt
