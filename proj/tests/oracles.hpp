#pragma once

// Brute-force oracles for fractional seminorms, independent of the panelized
// implementation: midpoint double sums excluding the diagonal, with
// exponent-aware Richardson extrapolation of the near-diagonal bias.

#include "gradedrt/seminorms.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

using gradedrt::Vec2;

inline double slob_1d_sum(const std::function<double(double)>& g, double a, double b,
                          double s, int n) {
  double h = (b - a) / n;
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i) vals[i] = g(a + (i + 0.5) * h);
  double sum = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      double d = vals[i] - vals[j];
      sum += d * d / std::pow(std::abs(i - j) * h, 1.0 + 2.0 * s) * h * h;
    }
  return sum;
}

inline double slob_1d(const std::function<double(double)>& g, double a, double b,
                      double s, int n) {
  double s1 = slob_1d_sum(g, a, b, s, n);
  double s2 = slob_1d_sum(g, a, b, s, 2 * n);
  double p = 2.0 - 2.0 * s;  // h^p bias of the excluded diagonal band
  double w = std::pow(2.0, -p);
  return (s2 - w * s1) / (1.0 - w);
}

inline double slob_2d_sum(const std::function<double(const Vec2&)>& g,
                          const std::function<bool(const Vec2&)>& inside, double s,
                          int n) {
  double h = 1.0 / n;
  std::vector<Vec2> pts;
  std::vector<double> vals;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec2 p((i + 0.5) * h, (j + 0.5) * h);
      if (!inside(p)) continue;
      pts.push_back(p);
      vals.push_back(g(p));
    }
  double sum = 0;
  int m = int(pts.size());
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      double d = vals[i] - vals[j];
      sum += 2.0 * d * d / std::pow((pts[i] - pts[j]).squaredNorm(), 1.0 + s) * h * h *
             h * h;
    }
  return sum;
}

inline double slob_2d(const std::function<double(const Vec2&)>& g,
                      const std::function<bool(const Vec2&)>& inside, double s,
                      int n) {
  double s1 = slob_2d_sum(g, inside, s, n);
  double s2 = slob_2d_sum(g, inside, s, 2 * n);
  double p = 2.0 - 2.0 * s;
  double w = std::pow(2.0, -p);
  return (s2 - w * s1) / (1.0 - w);
}

}  // namespace oracles
