#pragma once

// Straightforward re-implementations used as references in tests. They share
// no code with the library.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

// (1 - t^(2m))^p with the smallest m such that 2m >= ell + 1 and p = ell + 2.
inline double
weight(double t, int ell)
{
  if (std::abs(t) >= 1.0)
    return 0.0;
  const int m = (ell + 2) / 2;
  return std::pow(1.0 - std::pow(t, 2.0 * m), ell + 2.0);
}

// h^-2 / (2 pi^2) int_0^1 w(s) s cos(s x / h) ds, composite 61-point
// Gauss-Kronrod with about four panels per oscillation.
inline double
kernel(double x, double h, int ell)
{
  const double y = x / h;
  auto f = [&](double s) { return weight(s, ell) * s * std::cos(s * y); };
  const int panels = 4 + static_cast<int>(std::ceil(2.0 * std::abs(y) / pi));
  double g = 0.0;
  for (int i = 0; i < panels; ++i)
    g += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, double(i) / panels, double(i + 1) / panels, 0, 0.0);
  return g / (h * h) / (2.0 * pi * pi);
}

struct Polar
{
  std::vector<double> z;
  std::vector<double> u;
};

inline Polar
polar(const std::vector<double>& x, const std::vector<double>& y)
{
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::atan(x[a]) < std::atan(x[b]);
  });
  Polar p;
  for (auto i : idx) {
    p.z.push_back(std::atan(x[i]));
    p.u.push_back(y[i] / std::sqrt(1.0 + x[i] * x[i]));
  }
  return p;
}

inline bool
active(const Polar& p, std::size_t j, double delta)
{
  return p.z[j] >= -pi / 2 + delta && p.z[j + 1] <= pi / 2 - delta;
}

inline double
estimate(const Polar& p, double a0, double a1, double h, double delta, int ell)
{
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < p.z.size(); ++j)
    if (active(p, j, delta))
      sum += kernel(p.u[j] - a0 * std::cos(p.z[j]) - a1 * std::sin(p.z[j]), h,
                    ell) *
             (p.z[j + 1] - p.z[j]);
  return sum;
}

// S2 + S3 / delta + (L + pi/2)^2 + (pi/2 - R)^2 + delta^2 on sorted angles.
inline double
criterion(const std::vector<double>& z, double delta)
{
  double s2 = 0.0, s3 = 0.0;
  for (std::size_t j = 0; j + 1 < z.size(); ++j)
    if (z[j] >= -pi / 2 + delta && z[j + 1] <= pi / 2 - delta) {
      const double d = z[j + 1] - z[j];
      s2 += d * d;
      s3 += d * d * d;
    }
  std::vector<double> inside;
  for (double v : z)
    if (v >= -pi / 2 + delta && v <= pi / 2 - delta)
      inside.push_back(v);
  double left = -pi / 2, right = pi / 2;
  if (inside.size() >= 2) {
    left = *std::min_element(inside.begin(), inside.end());
    right = *std::max_element(inside.begin(), inside.end());
  }
  return s2 + s3 / delta + (left + pi / 2) * (left + pi / 2) +
         (pi / 2 - right) * (pi / 2 - right) + delta * delta;
}

} // namespace oracle
