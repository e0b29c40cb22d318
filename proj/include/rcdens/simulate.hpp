#pragma once

#include "rcdens/estimator.hpp"
#include "rcdens/kernel.hpp"
#include "rcdens/transform.hpp"
#include "rcdens/tuning.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace rcdens {

using Rng = std::mt19937_64;

//! Independent stream for (seed, a, b); replications use (seed, n, r).
Rng make_stream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0);

//! Uniform draw in the open interval (0, 1).
double uniform_open01(Rng& rng);

// ---------------------------------------------------------------------------
// Design

//! Regressor density f_X(x) = ((beta + 1) / 2) (1 + |x|)^(-beta - 2).
struct DesignSpec
{
  double beta = 2.0;
};

void validate(const DesignSpec& design);
double design_density(const DesignSpec& design, double x);
double design_cdf(const DesignSpec& design, double x);
double design_quantile(const DesignSpec& design, double u);
//! Density of Z = arctan X: f_X(tan z) / cos^2 z.
double angle_density(const DesignSpec& design, double z);

std::vector<double> sample_design(const DesignSpec& design,
                                  std::size_t n,
                                  Rng& rng);
std::vector<double> sample_design(const DesignSpec& design,
                                  std::size_t n,
                                  std::uint64_t seed);

// ---------------------------------------------------------------------------
// Coefficient densities

//! f(a0, a1) = 1 / (pi^2 (1 + a0^2) (1 + a1^2)).
struct ProductCauchy
{};

struct Gaussian
{
  std::array<double, 2> mean{ 0.0, 0.0 };
  std::array<std::array<double, 2>, 2> cov{ { { 1.0, 0.0 }, { 0.0, 1.0 } } };
};

struct MixtureComponent
{
  double weight;
  Gaussian gaussian;
};

struct GaussianMixture
{
  std::vector<MixtureComponent> components;
};

using CoefficientSpec = std::variant<ProductCauchy, Gaussian, GaussianMixture>;

void validate(const CoefficientSpec& spec);
std::string family_name(const CoefficientSpec& spec);

std::vector<std::array<double, 2>> sample_coefficients(
  const CoefficientSpec& spec,
  std::size_t n,
  Rng& rng);
std::vector<std::array<double, 2>> sample_coefficients(
  const CoefficientSpec& spec,
  std::size_t n,
  std::uint64_t seed);

double true_density(const CoefficientSpec& spec, EvalPoint a);

//! Draws (X, Y = A0 + A1 X): first n design values, then n coefficient pairs.
Dataset sample_model(const DesignSpec& design,
                     const CoefficientSpec& coeffs,
                     std::size_t n,
                     Rng& rng);

// ---------------------------------------------------------------------------
// Tuning rules

struct TuningPair
{
  double delta;
  double h;
};

//! delta = c_delta r^(1/(beta+1)), h = c_h r^(1/((alpha+2)(beta+1))) with
//! r = 1/n, or r = log(n)/n for the uniform-risk variant. Requires beta > 1.
TuningPair oracle_tuning(std::size_t n,
                         double alpha,
                         double beta,
                         double c_delta = 1.0,
                         double c_h = 1.0,
                         bool log_variant = false);

//! Exponent -2 alpha / ((alpha + 2)(beta + 1)) of the squared pointwise risk.
double theory_slope(double alpha, double beta);

struct OracleTuning
{
  double alpha = 2.0;
  double c_delta = 1.0;
  double c_h = 1.0;
  bool log_variant = false;
};

struct PluginTuning
{
  double alpha = 2.0;
};

struct LepskiTuning
{
  LepskiConfig config;
};

struct FixedTuning
{
  double h = 0.5;
  double delta = 0.1;
};

using TuningRule =
  std::variant<OracleTuning, PluginTuning, LepskiTuning, FixedTuning>;

std::string tuning_name(const TuningRule& rule);

// ---------------------------------------------------------------------------
// Monte Carlo

struct Scenario
{
  std::string id = "default";
  DesignSpec design;
  CoefficientSpec coeffs = ProductCauchy{};
  KernelSpec kernel = make_weight(4);
  KernelMode kernel_mode = KernelMode::tabulated;
  TuningRule tuning = OracleTuning{};
};

//! Throws UnsupportedRegimeError when a data-driven or oracle rule is
//! combined with beta <= 1.
void validate(const Scenario& scenario);

struct Replicate
{
  std::size_t replication = 0;
  double delta = 0.0;
  //! Per evaluation point (Lepski selects pointwise).
  std::vector<double> h;
  std::vector<double> estimates;
};

std::vector<Replicate> run_replications(const Scenario& scenario,
                                        std::span<const EvalPoint> points,
                                        std::size_t n,
                                        std::size_t replications,
                                        std::uint64_t seed,
                                        unsigned threads = 1);

//! Mean over replications of (estimate - truth)^2 at `a`.
double mc_risk(const Scenario& scenario,
               EvalPoint a,
               std::size_t n,
               std::size_t replications,
               std::uint64_t seed,
               unsigned threads = 1);

//! Per replication: max over `grid` of |estimate - truth|.
std::vector<double> sup_errors(const Scenario& scenario,
                               std::span<const EvalPoint> grid,
                               std::size_t n,
                               std::size_t replications,
                               std::uint64_t seed,
                               unsigned threads = 1);

struct RiskReport
{
  std::vector<double> n_values;
  std::vector<double> mse;
  std::size_t replications = 0;
  double slope = 0.0;
  double slope_se = 0.0;
  double theory_slope = 0.0;
};

//! Least-squares slope of log(mse) on log(n). Needs >= 4 distinct n.
RiskReport rate_fit(std::span<const std::pair<double, double>> n_mse,
                    double alpha,
                    double beta);

// ---------------------------------------------------------------------------
// Spacings

//! c_Z <= f_Z(z) / (pi/2 - |z|)^beta <= C_Z on (-pi/2, pi/2).
struct SpacingsBoundParams
{
  double c_z;
  double C_z;
};

SpacingsBoundParams spacings_bound_params(const DesignSpec& design);

//! int_delta^(pi/2) u^(-exponent) du.
double tail_power_integral(double delta, double exponent);

//! 2 kappa C_Z c_Z^-kappa Gamma(kappa) n (n-1)^-kappa
//!   * int_delta^(pi/2) u^(-beta (kappa - 1)) du
double spacings_bound(const DesignSpec& design,
                      const SpacingsBoundParams& params,
                      std::size_t n,
                      double delta,
                      double kappa);

struct SpacingsCheck
{
  double empirical;
  double bound;
  bool holds;
  SpacingsBoundParams params;
};

SpacingsCheck spacings_bound_check(const DesignSpec& design,
                                   std::size_t n,
                                   double delta,
                                   double kappa,
                                   std::size_t replications,
                                   std::uint64_t seed,
                                   unsigned threads = 1);

} // namespace rcdens
