#include "gradedrt/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace gradedrt {

namespace {

GaussRule make_gauss(int n) {
  // Newton iteration on Legendre polynomials; nodes mapped to [0,1].
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p0, p1, dp;
    for (int it = 0; it < 100; ++it) {
      p0 = 1.0;
      p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.x[i] = 0.5 * (1.0 - x);  // descending cos -> ascending node order
    r.w[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  std::reverse(r.x.begin(), r.x.end());
  std::reverse(r.w.begin(), r.w.end());
  return r;
}

}  // namespace

const GaussRule& gauss_rule(int order) {
  if (order < 1) order = 1;
  if (order > 96) order = 96;
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, make_gauss(order)).first;
  return it->second;
}

void Panelization::add_geometric(double a, double b, double target, double ratio,
                                 int levels) {
  double span = b - a;
  if (span <= 0) return;
  auto cluster = [&](double origin, double dir_to) {
    // cuts at origin + (dir_to - origin) * ratio^k
    double d = dir_to - origin;
    double f = 1.0;
    for (int k = 1; k <= levels; ++k) {
      f *= ratio;
      double x = origin + d * f;
      if (x > a && x < b) cuts_.push_back(x);
      if (std::abs(d * f) < 1e-300) break;
    }
  };
  if (target <= a + 1e-300 * span) {
    cluster(a, b);
  } else if (target >= b - 1e-300 * span) {
    cluster(b, a);
  } else if (target > a && target < b) {
    cuts_.push_back(target);
    cluster(target, b);
    cluster(target, a);
  }
}

std::vector<double> Panelization::build(double a, double b) const {
  std::vector<double> cs;
  for (double c : cuts_)
    if (c > a && c < b) cs.push_back(c);
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end(),
                       [](double x, double y) { return std::abs(x - y) < 1e-300; }),
           cs.end());
  return cs;
}

double integrate_panels(const Fn1& f, double a, double b,
                        std::span<const double> cuts, int order) {
  const GaussRule& g = gauss_rule(order);
  double sum = 0.0;
  double lo = a;
  auto panel = [&](double p, double q) {
    double len = q - p;
    if (len <= 0) return;
    double s = 0;
    for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(p + len * g.x[i]);
    sum += s * len;
  };
  for (double c : cuts) {
    panel(lo, c);
    lo = c;
  }
  panel(lo, b);
  return sum;
}

double integrate_graded(const Fn1& f, double a, double b,
                        std::span<const double> graded_points,
                        const QuadOptions& opts) {
  Panelization p;
  for (double gp : graded_points)
    p.add_geometric(a, b, gp, opts.split_ratio, opts.split_levels);
  auto cuts = p.build(a, b);
  return integrate_panels(f, a, b, cuts, opts.order);
}

double integrate_triangle(const Fn2& f, const Vec2& a, const Vec2& b, const Vec2& c,
                          int order) {
  double area = 0.5 * cross2(b - a, c - a);
  if (order <= 5) {
    // 7-point degree-5 symmetric rule
    static const double w1 = 0.225,
                        w2 = 0.1323941527885062,
                        w3 = 0.1259391805448271;
    static const double a2 = 0.0597158717897698, b2 = 0.4701420641051151;
    static const double a3 = 0.7974269853530873, b3 = 0.1012865073234563;
    struct P { double l1, l2, l3, w; };
    static const P pts[7] = {
        {1.0 / 3, 1.0 / 3, 1.0 / 3, w1}, {a2, b2, b2, w2}, {b2, a2, b2, w2},
        {b2, b2, a2, w2},               {a3, b3, b3, w3}, {b3, a3, b3, w3},
        {b3, b3, a3, w3}};
    double s = 0;
    for (const auto& p : pts) s += p.w * f(p.l1 * a + p.l2 * b + p.l3 * c);
    return s * area;
  }
  // collapsed tensor rule for higher orders
  const GaussRule& g = gauss_rule(order);
  double s = 0;
  for (std::size_t i = 0; i < g.x.size(); ++i)
    for (std::size_t j = 0; j < g.x.size(); ++j) {
      double u = g.x[i], v = g.x[j];
      Vec2 x = a + u * ((b - a) + v * (c - b));
      s += g.w[i] * g.w[j] * u * f(x);
    }
  return s * 2.0 * area;
}

double integrate_polygon(const Fn2& f, const ConvexPoly& poly, int order) {
  if (poly.n < 3) return 0.0;
  Vec2 c = poly.centroid();
  double s = 0;
  for (int i = 0; i < poly.n; ++i)
    s += integrate_triangle(f, c, poly.v[i], poly.v[(i + 1) % poly.n], order);
  return s;
}

double integrate_rect(const Fn2& f, const Vec2& lo, const Vec2& hi,
                      std::span<const double> graded_x,
                      std::span<const double> graded_y,
                      const QuadOptions& opts) {
  Panelization px, py;
  for (double gx : graded_x)
    px.add_geometric(lo.x(), hi.x(), gx, opts.split_ratio, opts.split_levels);
  for (double gy : graded_y)
    py.add_geometric(lo.y(), hi.y(), gy, opts.split_ratio, opts.split_levels);
  auto cx = px.build(lo.x(), hi.x());
  auto cy = py.build(lo.y(), hi.y());
  auto inner = [&](double y) {
    return integrate_panels([&](double x) { return f(Vec2(x, y)); }, lo.x(), hi.x(),
                            cx, opts.order);
  };
  return integrate_panels(inner, lo.y(), hi.y(), cy, opts.order);
}

}  // namespace gradedrt
