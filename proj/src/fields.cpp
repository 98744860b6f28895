#include "gradedrt/fields.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gradedrt {

LogLogProfile::LogLogProfile(double e) : eps(e) {
  if (!(e > 0)) throw std::invalid_argument("LogLogProfile: eps must be > 0");
  big_s = std::exp(1.0 / eps);
  rstar = std::exp(1.0 - big_s);  // underflows to 0 for small eps; intended
}

double LogLogProfile::w(double t) const {
  if (t <= 0.0) return 1.0;
  double l1 = 1.0 - std::log(t);          // = log(e/t) > 0 on (0, 1]
  double v = eps * std::log(l1);
  return v >= 1.0 ? 1.0 : v;
}

double LogLogProfile::dw(double t) const {
  if (t <= 0.0) return 0.0;
  double l1 = 1.0 - std::log(t);
  if (eps * std::log(l1) >= 1.0) return 0.0;  // inside the plateau (t <= rstar)
  return -eps / (t * l1);
}

double LogLogProfile::integrate_g_dw(const Fn1& g, double a, double b) const {
  // substitute tau = log(1 - log t): w' dt = eps dtau, tau decreasing in t;
  // w' vanishes for tau > 1/eps.
  if (!(b > a)) return 0.0;
  double tau_hi = a <= 0.0 ? 1.0 / eps : std::min(tau_of(a), 1.0 / eps);
  double tau_lo = std::max(tau_of(std::min(b, 1.0)), 0.0);
  if (b >= 1.0) tau_lo = 0.0;
  if (tau_hi <= tau_lo) return 0.0;
  const GaussRule& gr = gauss_rule(12);
  double sum = 0.0;
  int panels = std::max(1, int(std::ceil((tau_hi - tau_lo) / 0.5)));
  for (int p = 0; p < panels; ++p) {
    double t0 = tau_lo + (tau_hi - tau_lo) * p / panels;
    double t1 = tau_lo + (tau_hi - tau_lo) * (p + 1) / panels;
    double s = 0;
    for (std::size_t i = 0; i < gr.x.size(); ++i)
      s += gr.w[i] * g(t_of_tau(t0 + (t1 - t0) * gr.x[i]));
    sum += s * (t1 - t0);
  }
  return -eps * sum;
}

double LogLogProfile::integrate_g_dw2(const Fn1& g, double a, double b) const {
  // integral g w'^2 dt = eps^2 * int g(t(sigma)) e^(sigma-1) sigma^-2 dsigma
  // over sigma = 1 - log t in [sigma(b), min(sigma(a), S)]. Dominated by the
  // top end; factor out exp(sigma_top - 1).
  if (!(b > a)) return 0.0;
  double sig_lo = 1.0 - std::log(std::min(b, 1.0));
  if (b >= 1.0) sig_lo = 1.0;
  double sig_hi = a <= 0.0 ? big_s : std::min(1.0 - std::log(a), big_s);
  if (sig_hi <= sig_lo) return 0.0;
  double pref_exponent = sig_hi - 1.0;
  // remaining integrand: e^{-rho} g(t) / sigma^2, rho = sig_hi - sigma
  double rho_max = std::min(sig_hi - sig_lo, 60.0);
  const GaussRule& gr = gauss_rule(12);
  double integral = 0.0;
  int panels = std::max(1, int(std::ceil(rho_max / 1.0)));
  for (int p = 0; p < panels; ++p) {
    double r0 = rho_max * p / panels, r1 = rho_max * (p + 1) / panels;
    double s = 0;
    for (std::size_t i = 0; i < gr.x.size(); ++i) {
      double rho = r0 + (r1 - r0) * gr.x[i];
      double sigma = sig_hi - rho;
      double t = std::exp(1.0 - sigma);  // underflow to 0 is fine
      s += gr.w[i] * std::exp(-rho) * g(t) / (sigma * sigma);
    }
    integral += s * (r1 - r0);
  }
  if (pref_exponent > 700.0) {
    return integral > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return eps * eps * std::exp(pref_exponent) * integral;
}

std::vector<double> LogLogProfile::panel_cuts(double a, double b) const {
  std::vector<double> cuts;
  if (rstar > a && rstar < b) cuts.push_back(rstar);
  for (double tau = 0.5; tau < 7.0; tau += 0.5) {
    double t = t_of_tau(tau);
    if (t > a && t < b) cuts.push_back(t);
    if (t <= a || t < 1e-306) break;
  }
  return cuts;
}

VectorField make_affine_rt(double a, double b, double c) {
  VectorField f;
  f.u1 = [=](const Vec2& x) { return a + c * x.x(); };
  f.u2 = [=](const Vec2& x) { return b + c * x.y(); };
  f.div = [=](const Vec2&) { return 2.0 * c; };
  f.name = "affine-rt";
  return f;
}

VectorField make_rt_square(double a, double b, double c, double d) {
  VectorField f;
  f.u1 = [=](const Vec2& x) { return a + c * x.x(); };
  f.u2 = [=](const Vec2& x) { return b + d * x.y(); };
  f.div = [=](const Vec2&) { return c + d; };
  f.name = "rt-square";
  return f;
}

VectorField make_trig() {
  VectorField f;
  f.u1 = [](const Vec2& x) { return std::sin(M_PI * x.x()) * std::cos(M_PI * x.y()); };
  f.u2 = [](const Vec2& x) { return std::cos(M_PI * x.x()) * std::sin(M_PI * x.y()); };
  f.div = [](const Vec2& x) {
    return 2.0 * M_PI * std::cos(M_PI * x.x()) * std::cos(M_PI * x.y());
  };
  f.name = "trig";
  return f;
}

VectorField make_trig_divfree() {
  VectorField f;
  f.u1 = [](const Vec2& x) { return std::sin(M_PI * x.x()) * std::cos(M_PI * x.y()); };
  f.u2 = [](const Vec2& x) { return -std::cos(M_PI * x.x()) * std::sin(M_PI * x.y()); };
  f.div = [](const Vec2&) { return 0.0; };
  f.name = "trig-divfree";
  return f;
}

VectorField make_trig_mixed() {
  VectorField f;
  f.u1 = [](const Vec2& x) { return std::sin(x.x()); };
  f.u2 = [](const Vec2& x) { return std::cos(x.y()); };
  f.div = [](const Vec2& x) { return std::cos(x.x()) - std::sin(x.y()); };
  f.name = "trig-mixed";
  return f;
}

VectorField make_poly_divfree() {
  VectorField f;
  f.u1 = [](const Vec2& x) { return x.y() * x.y(); };
  f.u2 = [](const Vec2& x) { return x.x() * x.x(); };
  f.div = [](const Vec2&) { return 0.0; };
  f.name = "poly-divfree";
  return f;
}

VectorField make_edge_singular(double alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("edge_singular: alpha must be > 0");
  VectorField f;
  f.u1 = [=](const Vec2& x) { return (1.0 + alpha) * std::pow(x.y(), alpha); };
  f.u2 = [](const Vec2&) { return 0.0; };
  f.div = [](const Vec2&) { return 0.0; };
  f.singular = {{1, 0.0}};
  f.regularity_s = alpha + 0.5;
  f.name = "edge-singular";
  return f;
}

VectorField make_corner_singular(double alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("corner_singular: alpha must be > 0");
  VectorField f;
  f.u1 = [=](const Vec2& x) { return std::pow(x.y(), alpha); };
  f.u2 = [=](const Vec2& x) { return std::pow(x.x(), alpha); };
  f.div = [](const Vec2&) { return 0.0; };
  f.singular = {{0, 0.0}, {1, 0.0}};
  f.regularity_s = alpha + 0.5;
  f.name = "corner-singular";
  return f;
}

VectorField make_counterexample(double eps) {
  auto prof = std::make_shared<LogLogProfile>(eps);
  VectorField f;
  f.u1 = [prof](const Vec2& x) { return (1.0 - x.x()) * prof->dw(x.y()); };
  f.u2 = [prof](const Vec2& x) { return prof->w(x.y()); };
  f.div = [](const Vec2&) { return 0.0; };
  f.singular = {{1, 0.0}};
  f.profile = prof;
  f.regularity_s = 0.5;
  f.name = "counterexample";
  return f;
}

ScalarField make_scalar_const(double c) {
  return {[=](const Vec2&) { return c; }, {}, "const"};
}

ScalarField make_scalar_coord(int axis) {
  return {[=](const Vec2& x) { return x[axis]; }, {}, axis == 0 ? "x1" : "x2"};
}

ScalarField make_scalar_x1x2() {
  return {[](const Vec2& x) { return x.x() * x.y(); }, {}, "x1x2"};
}

ScalarField make_scalar_power(double alpha) {
  return {[=](const Vec2& x) { return std::pow(x.y(), alpha); },
          {{1, 0.0}},
          "power"};
}

ScalarField make_scalar_power_div(double alpha) {
  return {[=](const Vec2& x) { return alpha * (1.0 + alpha) * std::pow(x.y(), alpha - 1.0); },
          {{1, 0.0}},
          "power-div"};
}

ScalarField make_scalar_poly_random(unsigned seed) {
  // xorshift-based fixed coefficient stream; no global RNG state
  auto next = [state = std::uint64_t(seed * 2654435761u + 1)]() mutable {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return double(state % 2000) / 1000.0 - 1.0;
  };
  double c[10];
  for (double& ci : c) ci = next();
  return {[=](const Vec2& p) {
            double x = p.x(), y = p.y();
            return c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y +
                   c[5] * y * y + c[6] * x * x * x + c[7] * x * x * y +
                   c[8] * x * y * y + c[9] * y * y * y;
          },
          {},
          "poly-random"};
}

}  // namespace gradedrt
