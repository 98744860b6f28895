#include "gradedrt/seminorms.hpp"

#include <cmath>
#include <stdexcept>

namespace gradedrt {

ConvexPoly Region::polygon() const {
  if (kind == Kind::Rect)
    return ConvexPoly::rect(origin, origin + Vec2(h1, h2));
  return ConvexPoly::triangle(origin, origin + Vec2(h1, 0), origin + Vec2(h1, h2));
}

std::string Region::id() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s[%g,%g]", kind == Kind::Rect ? "rect" : "tri", h1,
                h2);
  return buf;
}

namespace {

// ---------------------------------------------------------------------------
// region integration with geometric refinement toward singular lines
// ---------------------------------------------------------------------------

std::vector<double> graded_targets(const std::vector<SingularLine>& singular, int axis,
                                   double lo, double hi) {
  std::vector<double> t;
  for (const auto& s : singular)
    if (s.axis == axis && s.at >= lo - 1e-12 && s.at <= hi + 1e-12)
      t.push_back(std::clamp(s.at, lo, hi));
  return t;
}

double integrate_region(const ScalarField& g, const Region& r, const QuadOptions& opts) {
  if (r.kind == Region::Kind::Rect) {
    auto gx = graded_targets(g.singular, 0, r.origin.x(), r.origin.x() + r.h1);
    auto gy = graded_targets(g.singular, 1, r.origin.y(), r.origin.y() + r.h2);
    return integrate_rect(g.eval, r.origin, r.origin + Vec2(r.h1, r.h2), gx, gy, opts);
  }
  // triangle via the collapse (u, v) -> origin + (h1 u, h2 u v)
  bool grade_u = false, grade_v = false;
  for (const auto& s : g.singular) {
    if (s.axis == 0 && std::abs(s.at - r.origin.x()) < 1e-12 * (r.h1 + 1)) grade_u = true;
    if (s.axis == 1 && std::abs(s.at - r.origin.y()) < 1e-12 * (r.h2 + 1)) {
      grade_u = true;
      grade_v = true;
    }
  }
  std::vector<double> gu, gv;
  if (grade_u) gu.push_back(0.0);
  if (grade_v) gv.push_back(0.0);
  return r.h1 * r.h2 *
         integrate_rect(
             [&](const Vec2& uv) {
               Vec2 x = r.origin + Vec2(r.h1 * uv.x(), r.h2 * uv.x() * uv.y());
               return uv.x() * g.eval(x);
             },
             {0, 0}, {1, 1}, gu, gv, opts);
}

// ---------------------------------------------------------------------------
// 1D Slobodeckij by the difference representation
// ---------------------------------------------------------------------------

struct Level1d {
  int outer_order, outer_levels, inner_order, inner_base, inner_levels;
};

Level1d level_1d(int level) {
  return {3 + level, 40 + 6 * level, 5 + level, 2 + 2 * level, 12 + 4 * level};
}

}  // namespace

double slobodeckij_1d_sq(const Fn1& g, double a, double b, double s,
                         std::span<const double> graded, int level) {
  double len = b - a;
  if (!(len > 0)) return 0.0;
  Level1d lv = level_1d(level);

  auto diff_sq = [&](double v) {
    // D(v) = int (g(w+v) - g(w))^2 dw over (a, b - v)
    Panelization p;
    for (int i = 1; i < lv.inner_base; ++i)
      p.add_cut(a + (b - v - a) * i / lv.inner_base);
    for (double gp : graded) {
      p.add_geometric(a, b - v, gp, 0.25, lv.inner_levels);
      p.add_geometric(a, b - v, gp - v, 0.25, lv.inner_levels);
    }
    auto cuts = p.build(a, b - v);
    return integrate_panels(
        [&](double w) {
          double d = g(w + v) - g(w);
          return d * d;
        },
        a, b - v, cuts, lv.inner_order);
  };

  Panelization pv;
  pv.add_geometric(0, len, 0.0, 0.5, lv.outer_levels);
  auto vcuts = pv.build(0, len);
  double val =
      2.0 * integrate_panels(
                [&](double v) { return std::pow(v, -1.0 - 2.0 * s) * diff_sq(v); }, 0,
                len, vcuts, lv.outer_order);
  return std::max(val, 0.0);
}

namespace {

// ---------------------------------------------------------------------------
// 2D Slobodeckij by polar difference representation
// ---------------------------------------------------------------------------

// integral of (g(x+d) - g(x))^2 over region ∩ (region - d)
double overlap_diff_sq(const ScalarField& g, const Region& r, const Vec2& d,
                       int inner_order, int strip_levels) {
  auto f = [&](const Vec2& x) {
    double v = g.eval(x + d) - g.eval(x);
    return v * v;
  };

  if (r.kind == Region::Kind::Rect) {
    Vec2 lo = r.origin, hi = r.origin + Vec2(r.h1, r.h2);
    Vec2 lo2 = lo - d, hi2 = hi - d;
    Vec2 clo = lo.cwiseMax(lo2), chi = hi.cwiseMin(hi2);
    if (clo.x() >= chi.x() || clo.y() >= chi.y()) return 0.0;
    std::vector<double> gx, gy;
    for (const auto& s : g.singular) {
      for (double at : {s.at, s.at - d[s.axis]}) {
        auto& tg = s.axis == 0 ? gx : gy;
        double lo_c = s.axis == 0 ? clo.x() : clo.y();
        double hi_c = s.axis == 0 ? chi.x() : chi.y();
        if (at >= lo_c - 1e-14 && at <= hi_c + 1e-14)
          tg.push_back(std::clamp(at, lo_c, hi_c));
      }
    }
    QuadOptions o;
    o.order = inner_order;
    o.split_ratio = 0.25;
    o.split_levels = strip_levels;
    return integrate_rect(f, clo, chi, gx, gy, o);
  }

  ConvexPoly shifted = r.polygon();
  for (int i = 0; i < shifted.n; ++i) shifted.v[i] -= d;
  ConvexPoly overlap = r.polygon().clip(shifted);
  if (overlap.n < 3 || std::abs(overlap.area()) < 1e-300) return 0.0;

  // strip subdivision toward singular lines (per axis)
  std::vector<double> ycuts, xcuts;
  double ylo = 1e300, yhi = -1e300, xlo = 1e300, xhi = -1e300;
  for (int i = 0; i < overlap.n; ++i) {
    ylo = std::min(ylo, overlap.v[i].y());
    yhi = std::max(yhi, overlap.v[i].y());
    xlo = std::min(xlo, overlap.v[i].x());
    xhi = std::max(xhi, overlap.v[i].x());
  }
  for (const auto& s : g.singular) {
    for (double at : {s.at, s.at - d[s.axis]}) {
      auto& cuts = s.axis == 0 ? xcuts : ycuts;
      double lo = s.axis == 0 ? xlo : ylo, hi = s.axis == 0 ? xhi : yhi;
      double span = hi - lo;
      if (span <= 0 || at > hi + span || at < lo - span) continue;
      double step = span;
      for (int k = 0; k < strip_levels; ++k) {
        step *= 0.5;
        for (double c : {at - step, at + step})
          if (c > lo && c < hi) cuts.push_back(c);
      }
      if (at > lo && at < hi) cuts.push_back(at);
    }
  }
  auto strip_integrate = [](const ConvexPoly& poly, int axis, std::vector<double> cuts,
                            auto&& leaf) -> double {
    if (cuts.empty()) return leaf(poly);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double sum = 0;
    Vec2 nrm = axis == 0 ? Vec2(1, 0) : Vec2(0, 1);
    double prev = -1e300;
    for (std::size_t i = 0; i <= cuts.size(); ++i) {
      double next = i < cuts.size() ? cuts[i] : 1e300;
      ConvexPoly piece = poly.clip_halfplane(nrm, next).clip_halfplane(-nrm, -prev);
      if (piece.n >= 3) sum += leaf(piece);
      prev = next;
    }
    return sum;
  };
  int order = inner_order <= 5 ? 5 : inner_order;
  return strip_integrate(overlap, 1, ycuts, [&](const ConvexPoly& py) {
    return strip_integrate(py, 0, xcuts, [&](const ConvexPoly& pp) {
      return integrate_polygon(f, pp, order);
    });
  });
}

double fractional_2d_sq(const ScalarField& g, const Region& r, double s, int level) {
  int theta_panels = 3 * level + 1;
  int theta_order = 6;
  int rho_levels = 40 + 4 * level;
  int rho_order = 3 + level;
  int inner_order = 3 + level;
  int strip_levels = 10 + 3 * level;

  double rho_max = r.diameter();
  const GaussRule& gt = gauss_rule(theta_order);
  const GaussRule& gr = gauss_rule(rho_order);

  Panelization pr;
  pr.add_geometric(0, rho_max, 0.0, 0.5, rho_levels);
  // extra cuts in the top octave where the overlap vanishes
  pr.add_cut(rho_max * 0.75);
  pr.add_cut(rho_max * 0.875);
  auto rcuts = pr.build(0, rho_max);

  double total = 0.0;
  for (int tp = 0; tp < theta_panels; ++tp) {
    double t0 = -M_PI_2 + M_PI * tp / theta_panels;
    double t1 = -M_PI_2 + M_PI * (tp + 1) / theta_panels;
    for (std::size_t it = 0; it < gt.x.size(); ++it) {
      double theta = t0 + (t1 - t0) * gt.x[it];
      double wt = gt.w[it] * (t1 - t0);
      Vec2 dir(std::cos(theta), std::sin(theta));
      double radial = 0.0;
      double lo = 0.0;
      auto do_panel = [&](double p0, double p1) {
        double acc = 0;
        for (std::size_t ir = 0; ir < gr.x.size(); ++ir) {
          double rho = p0 + (p1 - p0) * gr.x[ir];
          double a = overlap_diff_sq(g, r, rho * dir, inner_order, strip_levels);
          if (a != 0.0) acc += gr.w[ir] * std::pow(rho, -1.0 - 2.0 * s) * a;
        }
        radial += acc * (p1 - p0);
      };
      for (double c : rcuts) {
        do_panel(lo, c);
        lo = c;
      }
      do_panel(lo, rho_max);
      total += wt * radial;
    }
  }
  return std::max(2.0 * total, 0.0);
}

}  // namespace

SeminormValue fractional_seminorm(const ScalarField& g, const Region& region, double s,
                                  const SeminormOptions& opts) {
  if (!(s > 0.0 && s <= 1.0))
    throw std::invalid_argument("fractional_seminorm: s must be in (0, 1]");
  double v1 = fractional_2d_sq(g, region, s, opts.level);
  double v2 = fractional_2d_sq(g, region, s, opts.level + 1);
  SeminormValue out;
  out.value = std::sqrt(std::max(v2, 0.0));
  double scale = std::max({std::abs(v1), std::abs(v2), 1e-300});
  out.est_rel_error = std::abs(v2 - v1) / scale;
  out.converged = out.est_rel_error <= opts.nonconv_tol || v2 < 1e-24;
  out.s = s;
  out.axis = 0;
  out.region_id = region.id();
  return out;
}

namespace {

double anisotropic_sq(const ScalarField& g, const Region& r, double s, int axis,
                      int level) {
  // axis = 1: lines along x1, outer variable x2; axis = 2: the transpose.
  bool tri = r.kind == Region::Kind::Tri;
  double olo, ohi;
  if (axis == 1) {
    olo = r.origin.y();
    ohi = r.origin.y() + r.h2;
  } else {
    olo = r.origin.x();
    ohi = r.origin.x() + r.h1;
  }

  auto line_sq = [&](double c) {
    double llo, lhi;
    if (axis == 1) {
      llo = tri ? r.origin.x() + r.h1 * (c - r.origin.y()) / r.h2 : r.origin.x();
      lhi = r.origin.x() + r.h1;
    } else {
      llo = r.origin.y();
      lhi = tri ? r.origin.y() + r.h2 * (c - r.origin.x()) / r.h1
                : r.origin.y() + r.h2;
    }
    if (lhi - llo < 1e-14) return 0.0;
    std::vector<double> graded;
    for (const auto& sl : g.singular)
      if ((axis == 1 && sl.axis == 0) || (axis == 2 && sl.axis == 1))
        graded.push_back(sl.at);
    Fn1 line = axis == 1 ? Fn1([&g, c](double t) { return g.eval(Vec2(t, c)); })
                         : Fn1([&g, c](double t) { return g.eval(Vec2(c, t)); });
    return slobodeckij_1d_sq(line, llo, lhi, s, graded, level);
  };

  Panelization p;
  for (int i = 1; i < 3 + level; ++i) p.add_cut(olo + (ohi - olo) * i / (3 + level));
  for (const auto& sl : g.singular) {
    if ((axis == 1 && sl.axis == 1) || (axis == 2 && sl.axis == 0))
      p.add_geometric(olo, ohi, sl.at, 0.25, 10 + 3 * level);
  }
  if (tri)  // line length degenerates at the lower end
    p.add_geometric(olo, ohi, olo, 0.5, 8 + 2 * level);
  auto cuts = p.build(olo, ohi);
  return integrate_panels(line_sq, olo, ohi, cuts, 4 + level);
}

}  // namespace

SeminormValue anisotropic_seminorm(const ScalarField& g, const Region& region,
                                   double s, int axis, const SeminormOptions& opts) {
  if (axis != 1 && axis != 2)
    throw std::invalid_argument("anisotropic_seminorm: axis must be 1 or 2");
  if (!(s > 0.0 && s <= 1.0))
    throw std::invalid_argument("anisotropic_seminorm: s must be in (0, 1]");
  double v1 = anisotropic_sq(g, region, s, axis, opts.level);
  double v2 = anisotropic_sq(g, region, s, axis, opts.level + 1);
  SeminormValue out;
  out.value = std::sqrt(std::max(v2, 0.0));
  double scale = std::max({std::abs(v1), std::abs(v2), 1e-300});
  out.est_rel_error = std::abs(v2 - v1) / scale;
  out.converged = out.est_rel_error <= opts.nonconv_tol || v2 < 1e-24;
  out.s = s;
  out.axis = axis;
  out.region_id = region.id();
  return out;
}

double l2_norm(const ScalarField& g, const Region& region, int order) {
  ScalarField sq{[&g](const Vec2& x) {
                   double v = g.eval(x);
                   return v * v;
                 },
                 g.singular,
                 g.name};
  QuadOptions o;
  o.order = order;
  return std::sqrt(std::max(integrate_region(sq, region, o), 0.0));
}

double hs_norm(const ScalarField& g, const Region& region, double s,
               const SeminormOptions& opts) {
  double l2 = l2_norm(g, region);
  SeminormValue sm = fractional_seminorm(g, region, s, opts);
  return std::sqrt(l2 * l2 + sm.value * sm.value);
}

double l2_error(const VectorField& u, const RtFunction& f, const GradedMesh& mesh,
                const QuadOptions& opts) {
  double sum = 0.0;
  for (std::size_t k = 0; k < mesh.elements.size(); ++k) {
    const Element& el = mesh.elements[k];
    Mat2 inv = el.map.a.inverse();
    sum += integrate_element(
        mesh, int(k),
        [&](const Vec2& x) {
          Vec2 xr = inv * (x - el.map.b);
          Vec2 d = Vec2(u.u1(x), u.u2(x)) - f.eval_local(int(k), xr);
          return d.squaredNorm();
        },
        u.singular, opts);
  }
  return std::sqrt(std::max(sum, 0.0));
}

double l2_norm_component(const RtFunction& f, int component) {
  const GradedMesh& mesh = *f.mesh;
  double sum = 0.0;
  QuadOptions opts;
  opts.order = 5;
  for (std::size_t k = 0; k < mesh.elements.size(); ++k) {
    const Element& el = mesh.elements[k];
    Mat2 inv = el.map.a.inverse();
    sum += integrate_element(
        mesh, int(k),
        [&](const Vec2& x) {
          Vec2 xr = inv * (x - el.map.b);
          double v = f.eval_local(int(k), xr)[component];
          return v * v;
        },
        {}, opts);
  }
  return std::sqrt(std::max(sum, 0.0));
}

NormEquivalenceReport norm_equivalence_report(const ScalarField& g, double s,
                                              const SeminormOptions& opts) {
  Region q = Region::unit_square();
  NormEquivalenceReport rep;
  rep.lhs = hs_norm(g, q, s, opts);
  double l2 = l2_norm(g, q);
  rep.rhs = l2 + anisotropic_seminorm(g, q, s, 1, opts).value +
            anisotropic_seminorm(g, q, s, 2, opts).value;
  rep.ratio = rep.lhs / rep.rhs;
  return rep;
}

PiolaScalingReport piola_scaling_identity_check(double h1, double h2,
                                                const ScalarField& g,
                                                const SeminormOptions& opts) {
  if (!(h1 > 0 && h2 > 0))
    throw std::invalid_argument("piola_scaling_identity_check: h must be positive");
  Region that = Region::unit_triangle();
  Region t{Region::Kind::Tri, Vec2::Zero(), h1, h2};

  auto scale_singular = [&](const std::vector<SingularLine>& in) {
    std::vector<SingularLine> out;
    for (const auto& sl : in)
      out.push_back({sl.axis, sl.at / (sl.axis == 0 ? h1 : h2)});
    return out;
  };
  // contravariant components on the reference triangle under diag(h1, h2):
  // u1_hat = h2 g(Bx), u2_hat = h1 g(Bx)
  ScalarField u1_hat{[&g, h1, h2](const Vec2& x) {
                       return h2 * g.eval(Vec2(h1 * x.x(), h2 * x.y()));
                     },
                     scale_singular(g.singular),
                     g.name + "-hat1"};
  ScalarField u2_hat{[&g, h1, h2](const Vec2& x) {
                       return h1 * g.eval(Vec2(h1 * x.x(), h2 * x.y()));
                     },
                     scale_singular(g.singular),
                     g.name + "-hat2"};

  PiolaScalingReport rep;
  double lhs = std::pow(l2_norm(u1_hat, that, 12), 2);
  double rhs = h2 / h1 * std::pow(l2_norm(g, t, 12), 2);
  rep.l2_residual = std::abs(lhs / rhs - 1.0);

  double lhs2 = std::pow(anisotropic_seminorm(u2_hat, that, 0.5, 2, opts).value, 2);
  double rhs2 = h1 * std::pow(anisotropic_seminorm(g, t, 0.5, 2, opts).value, 2);
  rep.ah2_residual = std::abs(lhs2 / rhs2 - 1.0);

  double hmax = std::max(h1, h2);
  double lhs3 = std::pow(fractional_seminorm(u1_hat, that, 0.5, opts).value, 2);
  double rhs3 = hmax * hmax * hmax / (h1 * h1) *
                std::pow(fractional_seminorm(g, t, 0.5, opts).value, 2);
  rep.h12_slack = rhs3 / std::max(lhs3, 1e-300);
  rep.h12_holds = lhs3 <= rhs3 * 1.05;
  return rep;
}

}  // namespace gradedrt
