#pragma once

// Shared quadrature and small numeric helpers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace smile {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2Pi = 2.50662827463100050242;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace quad {

// 16-point Gauss-Legendre rule on [-1,1].
inline constexpr int kGlN = 16;
inline constexpr double kGlX[kGlN] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318,
    -0.7554044083550030, -0.6178762444026438, -0.4580167776572274,
    -0.2816035507792589, -0.0950125098376374, 0.0950125098376374,
    0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,
    0.9894009349916499};
inline constexpr double kGlW[kGlN] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928,
    0.1246289712555339, 0.1495959888165767, 0.1691565193950025,
    0.1826034150449236, 0.1894506104550685, 0.1894506104550685,
    0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479,
    0.0271524594117541};

template <class F>
double gl16(F&& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < kGlN; ++i) s += kGlW[i] * f(c + h * kGlX[i]);
  return h * s;
}

// Composite rule with n equal panels.
template <class F>
double composite_gl16(F&& f, double a, double b, int n_panels) {
  double s = 0.0;
  const double h = (b - a) / n_panels;
  for (int k = 0; k < n_panels; ++k) s += gl16(f, a + k * h, a + (k + 1) * h);
  return s;
}

}  // namespace quad

// log(sum(exp(x_i))) without overflow; -inf for an empty or all -inf input.
inline double log_sum_exp(const std::vector<double>& xs) {
  double m = -kInf;
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return -kInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

// log(exp(a) + exp(b)).
inline double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (!std::isfinite(a)) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace smile
