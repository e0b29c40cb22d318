#include "rcdens/kernel.hpp"

#include "rcdens/errors.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace rcdens {

namespace {

double
ipow(double base, int exponent)
{
  double result = 1.0;
  while (exponent > 0) {
    if (exponent & 1)
      result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

double
binomial(int n, int k)
{
  double result = 1.0;
  for (int i = 1; i <= k; ++i)
    result = result * (n - k + i) / i;
  return std::round(result);
}

} // namespace

KernelSpec
make_weight(int ell, int quadrature_nodes)
{
  if (ell < 0 || ell > max_kernel_order)
    throw ParameterError("kernel order ell must lie in [0, " +
                         std::to_string(max_kernel_order) + "], got " +
                         std::to_string(ell));
  if (quadrature_nodes < 1)
    throw ParameterError("quadrature_nodes must be positive");
  KernelSpec spec;
  spec.ell = ell;
  spec.m = std::max(1, (ell + 2) / 2); // smallest m with 2m >= ell + 1
  spec.p = ell + 2;
  spec.quadrature_nodes = quadrature_nodes;
  return spec;
}

double
eval_weight(const KernelSpec& spec, double t)
{
  const double a = std::abs(t);
  if (a >= 1.0)
    return 0.0;
  return ipow(1.0 - ipow(a, 2 * spec.m), spec.p);
}

std::pair<std::vector<double>, std::vector<double>>
gauss_legendre(int n)
{
  if (n < 1)
    throw ParameterError("Gauss-Legendre order must be positive");
  std::vector<double> x(n), w(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15)
        break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
  return { std::move(x), std::move(w) };
}

Kernel::Kernel(KernelSpec spec, KernelMode mode)
  : spec_(spec)
  , mode_(mode)
{
  if (spec_.ell < 0 || spec_.m < 1 || 2 * spec_.m < spec_.ell + 1 ||
      spec_.p < spec_.ell + 2 || 2 * spec_.m * spec_.p + 1 > 160)
    throw ParameterError("invalid kernel specification (need 2m >= ell + 1, "
                         "p >= ell + 2, 2mp + 1 <= 160)");
  if (spec_.quadrature_nodes < 1)
    throw ParameterError("quadrature_nodes must be positive");

  // s * (1 - s^(2m))^p = sum_i binom(p, i) (-1)^i s^(2 m i + 1)
  for (int i = 0; i <= spec_.p; ++i) {
    const double c = binomial(spec_.p, i) * ((i % 2) ? -1.0 : 1.0);
    terms_.emplace_back(2 * spec_.m * i + 1, c);
  }
  degree_ = terms_.back().first;

  deriv_at_zero_.assign(degree_ + 1, 0.0);
  deriv_at_one_.assign(degree_ + 1, 0.0);
  for (const auto& [d, c] : terms_) {
    long double fact = 1.0L;
    for (int k = 1; k <= d; ++k)
      fact *= k;
    deriv_at_zero_[d] = static_cast<double>(fact * c);
  }
  // s = 1 is a root of order p, so lower derivatives vanish identically.
  for (int k = spec_.p; k <= degree_; ++k) {
    long double sum = 0.0L;
    for (const auto& [d, c] : terms_) {
      if (d < k)
        continue;
      long double falling = 1.0L;
      for (int i = 0; i < k; ++i)
        falling *= static_cast<long double>(d - i);
      sum += falling * c;
    }
    deriv_at_one_[k] = static_cast<double>(sum);
  }

  const int order = std::max(spec_.quadrature_nodes, degree_ / 2 + 16);
  auto [x, w] = gauss_legendre(order);
  nodes_.resize(order);
  weights_.resize(order);
  g_at_nodes_.resize(order);
  for (int i = 0; i < order; ++i) {
    nodes_[i] = 0.5 * (x[i] + 1.0);
    weights_[i] = 0.5 * w[i];
    g_at_nodes_[i] = weights_[i] * g(nodes_[i]);
  }

  series_threshold_ = std::max(64.0, 2.0 * degree_);

  if (mode_ == KernelMode::tabulated) {
    table_step_ = 1.0 / 64.0;
    const auto count =
      static_cast<std::size_t>(std::ceil(series_threshold_ / table_step_)) + 2;
    table_value_.resize(count);
    table_slope_.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double y = static_cast<double>(i) * table_step_;
      const int nodes = 2 * node_count(y);
      table_value_[i] = profile_quadrature(y, nodes);
      table_slope_[i] = profile_derivative_quadrature(y, nodes);
    }
  }
}

double
Kernel::g(double s) const
{
  return s * ipow(1.0 - ipow(s, 2 * spec_.m), spec_.p);
}

int
Kernel::node_count(double y) const
{
  const double freq = std::ceil(4.0 * std::abs(y) / std::numbers::pi) + 32.0;
  const double base = static_cast<double>(nodes_.size());
  return static_cast<int>(std::max(base, std::min(freq, 1e9)));
}

double
Kernel::panel_sum(double y, int panels, bool derivative) const
{
  const auto order = nodes_.size();
  if (panels == 1 && !derivative) {
    double sum = 0.0;
    for (std::size_t i = 0; i < order; ++i)
      sum += g_at_nodes_[i] * std::cos(nodes_[i] * y);
    return sum;
  }
  const double width = 1.0 / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    double sum = 0.0;
    for (std::size_t i = 0; i < order; ++i) {
      const double s = (p + nodes_[i]) * width;
      if (derivative)
        sum -= weights_[i] * g(s) * s * std::sin(s * y);
      else
        sum += weights_[i] * g(s) * std::cos(s * y);
    }
    total += sum * width;
  }
  return total;
}

double
Kernel::profile_quadrature(double y, int nodes) const
{
  const int order = static_cast<int>(nodes_.size());
  const int panels = std::max(1, (nodes + order - 1) / order);
  return panel_sum(y, panels, false);
}

double
Kernel::profile_derivative_quadrature(double y, int nodes) const
{
  const int order = static_cast<int>(nodes_.size());
  const int panels = std::max(1, (nodes + order - 1) / order);
  return panel_sum(y, panels, true);
}

double
Kernel::profile_series(double y) const
{
  // int_0^1 g(s) e^{isy} ds = sum_k (-1)^k [g^(k)(1) e^{iy} - g^(k)(0)] / (iy)^(k+1)
  // and (-1)^k / (iy)^(k+1) = -i^(k+1) / y^(k+1).
  const double r = 1.0 / y;
  std::complex<double> at_one{ 0.0, 0.0 };
  std::complex<double> at_zero{ 0.0, 0.0 };
  std::complex<double> coeff{ 0.0, -r }; // k = 0
  const std::complex<double> step{ 0.0, r };
  for (int k = 0; k <= degree_; ++k) {
    if (deriv_at_one_[k] != 0.0)
      at_one += deriv_at_one_[k] * coeff;
    if (deriv_at_zero_[k] != 0.0)
      at_zero += deriv_at_zero_[k] * coeff;
    coeff *= step;
  }
  const std::complex<double> phase{ std::cos(y), std::sin(y) };
  return (at_one * phase - at_zero).real();
}

double
Kernel::profile_exact(double y) const
{
  const double a = std::abs(y);
  if (a >= series_threshold_)
    return profile_series(a);
  return profile_quadrature(a, node_count(a));
}

double
Kernel::profile_table(double y) const
{
  const double a = std::abs(y);
  if (a >= series_threshold_)
    return profile_series(a);
  const double pos = a / table_step_;
  const auto i = static_cast<std::size_t>(pos);
  const double t = pos - static_cast<double>(i);
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2.0 * t3 - 3.0 * t2 + 1.0) * table_value_[i] +
         (t3 - 2.0 * t2 + t) * table_step_ * table_slope_[i] +
         (3.0 * t2 - 2.0 * t3) * table_value_[i + 1] +
         (t3 - t2) * table_step_ * table_slope_[i + 1];
}

double
Kernel::profile_unchecked(double y) const
{
  return mode_ == KernelMode::tabulated ? profile_table(y) : profile_exact(y);
}

double
Kernel::operator()(double x, double h) const
{
  if (!(h > 0.0) || !std::isfinite(h))
    throw ParameterError("bandwidth h must be positive and finite");
  return eval_unchecked(x, h);
}

double
Kernel::weight_moment(int power) const
{
  // w >= 0 on [0, 1] and the base rule integrates this polynomial exactly.
  double total = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    total += weights_[i] * eval_weight(spec_, nodes_[i]) * ipow(nodes_[i], power);
  return total;
}

double
Kernel::sup_bound(double h) const
{
  return h_scale / (h * h) * weight_moment(1);
}

double
Kernel::lipschitz_bound(double h) const
{
  return h_scale / (h * h * h) * weight_moment(2);
}

} // namespace rcdens
