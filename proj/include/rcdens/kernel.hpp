#pragma once

#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

namespace rcdens {

//! Flat-top weight w(t) = (1 - t^(2m))^p on [-1, 1], zero outside.
//!
//! With 2m >= ell + 1 and p = ell + 2 the weight is even, equals 1 at the
//! origin with vanishing derivatives of orders 1..ell there, is ell+1 times
//! continuously differentiable on the real line and bounded by 1.
struct KernelSpec
{
  int ell = 4;
  int m = 3;
  int p = 6;
  //! Gauss-Legendre order of one quadrature panel.
  int quadrature_nodes = 48;
};

inline constexpr int max_kernel_order = 10;

KernelSpec make_weight(int ell, int quadrature_nodes = 48);

double eval_weight(const KernelSpec& spec, double t);

//! Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

enum class KernelMode
{
  //! Panel Gauss-Legendre quadrature, closed-form tail for large arguments.
  quadrature,
  //! Cubic Hermite table built from the quadrature route; for bulk Monte
  //! Carlo work. Absolute error below 1e-11 * h^-2.
  tabulated
};

//! Fourier-inversion kernel
//!   K(x; h) = (2 / (2 pi)^2) int_0^inf w(t h) t cos(t x) dt
//!           = h^-2 / (2 pi^2) * G(x / h),
//! where G(y) = int_0^1 w(s) s cos(s y) ds is the kernel profile.
class Kernel
{
public:
  explicit Kernel(KernelSpec spec, KernelMode mode = KernelMode::quadrature);

  const KernelSpec& spec() const { return spec_; }
  KernelMode mode() const { return mode_; }

  double weight(double t) const { return eval_weight(spec_, t); }

  //! K(x; h). Throws ParameterError unless h > 0.
  double operator()(double x, double h) const;

  //! K(x; h) without argument checks, for inner loops.
  double eval_unchecked(double x, double h) const
  {
    return h_scale / (h * h) * profile_unchecked(x / h);
  }

  //! G(y) by the configured route.
  double profile(double y) const { return profile_unchecked(y); }

  //! G(y) by panel Gauss-Legendre with at least `nodes` nodes in total.
  double profile_quadrature(double y, int nodes) const;
  //! G'(y) by the same rule.
  double profile_derivative_quadrature(double y, int nodes) const;
  //! G(y) by exact integration by parts of the polynomial s w(s).
  //! Accurate for |y| >= series_threshold().
  double profile_series(double y) const;

  //! Node count of the oscillation-adapted rule for argument y.
  int node_count(double y) const;
  double series_threshold() const { return series_threshold_; }

  //! int_0^1 |w(s)| s^power ds.
  double weight_moment(int power) const;
  //! h^-2 / (2 pi^2) * int_0^1 |w(s)| s ds, a bound on |K(.; h)|.
  double sup_bound(double h) const;
  //! h^-3 / (2 pi^2) * int_0^1 |w(s)| s^2 ds, a bound on |dK/dx(.; h)|.
  double lipschitz_bound(double h) const;

  static constexpr double h_scale =
    1.0 / (2.0 * std::numbers::pi * std::numbers::pi);

private:
  double profile_unchecked(double y) const;
  double profile_exact(double y) const;
  double profile_table(double y) const;
  double panel_sum(double y, int panels, bool derivative) const;
  double g(double s) const;

  KernelSpec spec_;
  KernelMode mode_;
  // s * w(s) as sparse polynomial: (degree, coefficient)
  std::vector<std::pair<int, double>> terms_;
  int degree_ = 0;
  // g^(k)(0) and g^(k)(1), k = 0..degree_
  std::vector<double> deriv_at_zero_;
  std::vector<double> deriv_at_one_;
  std::vector<double> nodes_;   // base panel on [0, 1]
  std::vector<double> weights_; // base panel on [0, 1]
  std::vector<double> g_at_nodes_;
  double series_threshold_ = 0.0;
  // Hermite table of G and G' on [0, series_threshold_]
  double table_step_ = 0.0;
  std::vector<double> table_value_;
  std::vector<double> table_slope_;
};

inline double
eval_K(const Kernel& kernel, double x, double h)
{
  return kernel(x, h);
}

} // namespace rcdens
