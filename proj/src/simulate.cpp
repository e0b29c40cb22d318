#include "rcdens/simulate.hpp"

#include "parallel.hpp"
#include "rcdens/errors.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace rcdens {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double half_pi = pi / 2.0;

template<class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};

std::array<double, 2>
standard_normal_pair(Rng& rng)
{
  const double r = std::sqrt(-2.0 * std::log(uniform_open01(rng)));
  const double theta = 2.0 * pi * uniform_open01(rng);
  return { r * std::cos(theta), r * std::sin(theta) };
}

void
validate(const Gaussian& g)
{
  const auto& c = g.cov;
  if (!std::isfinite(g.mean[0]) || !std::isfinite(g.mean[1]))
    throw ParameterError("gaussian mean must be finite");
  if (c[0][1] != c[1][0])
    throw ParameterError("gaussian covariance must be symmetric");
  if (!(c[0][0] > 0.0) || !(c[0][0] * c[1][1] - c[0][1] * c[1][0] > 0.0))
    throw ParameterError("gaussian covariance must be positive definite");
}

std::array<double, 2>
sample(const Gaussian& g, Rng& rng)
{
  const auto& c = g.cov;
  const double l00 = std::sqrt(c[0][0]);
  const double l10 = c[1][0] / l00;
  const double l11 = std::sqrt(c[1][1] - l10 * l10);
  const auto [e0, e1] = standard_normal_pair(rng);
  return { g.mean[0] + l00 * e0, g.mean[1] + l10 * e0 + l11 * e1 };
}

double
density(const Gaussian& g, EvalPoint a)
{
  const auto& c = g.cov;
  const double det = c[0][0] * c[1][1] - c[0][1] * c[1][0];
  const double d0 = a.a0 - g.mean[0];
  const double d1 = a.a1 - g.mean[1];
  const double q = (c[1][1] * d0 * d0 - 2.0 * c[0][1] * d0 * d1 +
                    c[0][0] * d1 * d1) /
                   det;
  return std::exp(-0.5 * q) / (2.0 * pi * std::sqrt(det));
}

void
require_tunable(const DesignSpec& design)
{
  if (!(design.beta > 1.0))
    throw UnsupportedRegimeError(
      "tuning rules require a design tail exponent beta > 1 (got beta = " +
      std::to_string(design.beta) +
      "); use fixed tuning for beta <= 1");
}

// f_Z(z) / (pi/2 - |z|)^beta written in eps = pi/2 - |z|
double
angle_ratio(double beta, double eps)
{
  const double s = std::sin(eps);
  const double c = std::cos(eps);
  return 0.5 * (beta + 1.0) * std::pow(s / (s + c), beta + 2.0) /
         (s * s * std::pow(eps, beta));
}

} // namespace

Rng
make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{ lo(seed), hi(seed), lo(a), hi(a), lo(b), hi(b) };
  return Rng(seq);
}

double
uniform_open01(Rng& rng)
{
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------

void
validate(const DesignSpec& design)
{
  if (!(design.beta > 0.0) || !std::isfinite(design.beta))
    throw ParameterError("design tail exponent beta must be positive, got " +
                         std::to_string(design.beta));
}

double
design_density(const DesignSpec& design, double x)
{
  return 0.5 * (design.beta + 1.0) *
         std::pow(1.0 + std::abs(x), -design.beta - 2.0);
}

double
design_cdf(const DesignSpec& design, double x)
{
  const double tail = 0.5 * std::pow(1.0 + std::abs(x), -(design.beta + 1.0));
  return x >= 0.0 ? 1.0 - tail : tail;
}

double
design_quantile(const DesignSpec& design, double u)
{
  const double e = -1.0 / (design.beta + 1.0);
  if (u >= 0.5)
    return std::pow(2.0 * (1.0 - u), e) - 1.0;
  return -(std::pow(2.0 * u, e) - 1.0);
}

double
angle_density(const DesignSpec& design, double z)
{
  const double c = std::cos(z);
  return design_density(design, std::tan(z)) / (c * c);
}

std::vector<double>
sample_design(const DesignSpec& design, std::size_t n, Rng& rng)
{
  validate(design);
  if (n < 1)
    throw ParameterError("sample size must be positive");
  std::vector<double> x(n);
  for (auto& v : x)
    v = design_quantile(design, uniform_open01(rng));
  return x;
}

std::vector<double>
sample_design(const DesignSpec& design, std::size_t n, std::uint64_t seed)
{
  auto rng = make_stream(seed);
  return sample_design(design, n, rng);
}

// ---------------------------------------------------------------------------

void
validate(const CoefficientSpec& spec)
{
  std::visit(overloaded{
               [](const ProductCauchy&) {},
               [](const Gaussian& g) { validate(g); },
               [](const GaussianMixture& m) {
                 if (m.components.empty())
                   throw ParameterError("mixture needs at least one component");
                 double total = 0.0;
                 for (const auto& c : m.components) {
                   if (!(c.weight > 0.0))
                     throw ParameterError("mixture weights must be positive");
                   validate(c.gaussian);
                   total += c.weight;
                 }
                 if (std::abs(total - 1.0) > 1e-9)
                   throw ParameterError("mixture weights must sum to 1");
               } },
             spec);
}

std::string
family_name(const CoefficientSpec& spec)
{
  return std::visit(overloaded{
                      [](const ProductCauchy&) { return "product_cauchy"; },
                      [](const Gaussian&) { return "gaussian"; },
                      [](const GaussianMixture&) { return "gaussian_mixture"; } },
                    spec);
}

std::vector<std::array<double, 2>>
sample_coefficients(const CoefficientSpec& spec, std::size_t n, Rng& rng)
{
  validate(spec);
  if (n < 1)
    throw ParameterError("sample size must be positive");
  std::vector<std::array<double, 2>> out(n);
  std::visit(overloaded{
               [&](const ProductCauchy&) {
                 for (auto& a : out) {
                   a[0] = std::tan(pi * (uniform_open01(rng) - 0.5));
                   a[1] = std::tan(pi * (uniform_open01(rng) - 0.5));
                 }
               },
               [&](const Gaussian& g) {
                 for (auto& a : out)
                   a = sample(g, rng);
               },
               [&](const GaussianMixture& m) {
                 for (auto& a : out) {
                   double u = uniform_open01(rng);
                   std::size_t k = 0;
                   while (k + 1 < m.components.size() &&
                          u > m.components[k].weight) {
                     u -= m.components[k].weight;
                     ++k;
                   }
                   a = sample(m.components[k].gaussian, rng);
                 }
               } },
             spec);
  return out;
}

std::vector<std::array<double, 2>>
sample_coefficients(const CoefficientSpec& spec,
                    std::size_t n,
                    std::uint64_t seed)
{
  auto rng = make_stream(seed);
  return sample_coefficients(spec, n, rng);
}

double
true_density(const CoefficientSpec& spec, EvalPoint a)
{
  return std::visit(
    overloaded{ [&](const ProductCauchy&) {
                 return 1.0 /
                        (pi * pi * (1.0 + a.a0 * a.a0) * (1.0 + a.a1 * a.a1));
               },
                [&](const Gaussian& g) { return density(g, a); },
                [&](const GaussianMixture& m) {
                  double sum = 0.0;
                  for (const auto& c : m.components)
                    sum += c.weight * density(c.gaussian, a);
                  return sum;
                } },
    spec);
}

Dataset
sample_model(const DesignSpec& design,
             const CoefficientSpec& coeffs,
             std::size_t n,
             Rng& rng)
{
  const auto x = sample_design(design, n, rng);
  const auto a = sample_coefficients(coeffs, n, rng);
  std::vector<Observation> pairs(n);
  for (std::size_t i = 0; i < n; ++i)
    pairs[i] = { x[i], a[i][0] + a[i][1] * x[i] };
  return Dataset(std::move(pairs));
}

// ---------------------------------------------------------------------------

TuningPair
oracle_tuning(std::size_t n,
              double alpha,
              double beta,
              double c_delta,
              double c_h,
              bool log_variant)
{
  require_tunable(DesignSpec{ beta });
  if (!(alpha > 0.0))
    throw ParameterError("smoothness alpha must be positive");
  if (!(c_delta > 0.0) || !(c_h > 0.0))
    throw ParameterError("tuning constants must be positive");
  if (n < 1)
    throw ParameterError("sample size must be positive");
  const double dn = static_cast<double>(n);
  const double rate = log_variant ? std::log(dn) / dn : 1.0 / dn;
  return { c_delta * std::pow(rate, 1.0 / (beta + 1.0)),
           c_h * std::pow(rate, 1.0 / ((alpha + 2.0) * (beta + 1.0))) };
}

double
theory_slope(double alpha, double beta)
{
  return -2.0 * alpha / ((alpha + 2.0) * (beta + 1.0));
}

std::string
tuning_name(const TuningRule& rule)
{
  return std::visit(overloaded{ [](const OracleTuning&) { return "oracle"; },
                                [](const PluginTuning&) { return "plugin"; },
                                [](const LepskiTuning&) { return "lepski"; },
                                [](const FixedTuning&) { return "fixed"; } },
                    rule);
}

// ---------------------------------------------------------------------------

void
validate(const Scenario& scenario)
{
  validate(scenario.design);
  validate(scenario.coeffs);
  std::visit(overloaded{
               [&](const OracleTuning& t) {
                 require_tunable(scenario.design);
                 if (!(t.alpha > 0.0) || !(t.c_delta > 0.0) || !(t.c_h > 0.0))
                   throw ParameterError("oracle tuning constants must be positive");
               },
               [&](const PluginTuning& t) {
                 require_tunable(scenario.design);
                 if (!(t.alpha > 0.0))
                   throw ParameterError("smoothness alpha must be positive");
               },
               [&](const LepskiTuning& t) {
                 require_tunable(scenario.design);
                 if (!(t.config.q > 1.0) || !(t.config.kappa_le > 0.0))
                   throw ParameterError("Lepski needs q > 1 and kappa_le > 0");
               },
               [&](const FixedTuning& t) { validate(EstimatorConfig{ t.h, t.delta }); } },
             scenario.tuning);
}

namespace {

Replicate
run_one(const Scenario& scenario,
        const Kernel& kernel,
        std::span<const EvalPoint> points,
        std::size_t n,
        std::size_t r,
        std::uint64_t seed)
{
  auto rng = make_stream(seed, n, r);
  const auto data =
    to_polar(sample_model(scenario.design, scenario.coeffs, n, rng));

  Replicate out;
  out.replication = r;
  out.h.resize(points.size());
  out.estimates.resize(points.size());

  auto fixed = [&](double delta, double h) {
    validate(EstimatorConfig{ h, delta });
    const WindowTerms terms(data, delta);
    out.delta = delta;
    for (std::size_t i = 0; i < points.size(); ++i) {
      out.h[i] = h;
      out.estimates[i] = terms.estimate(kernel, h, points[i]);
    }
  };

  std::visit(overloaded{
               [&](const OracleTuning& t) {
                 const auto p = oracle_tuning(n, t.alpha, scenario.design.beta,
                                              t.c_delta, t.c_h, t.log_variant);
                 fixed(p.delta, p.h);
               },
               [&](const PluginTuning& t) {
                 const auto sel = select_delta(data);
                 fixed(sel.delta_hat,
                       select_h_known_alpha(sel.criterion_value, t.alpha));
               },
               [&](const LepskiTuning& t) {
                 const auto sel = select_delta(data);
                 const WindowTerms terms(data, sel.delta_hat);
                 out.delta = sel.delta_hat;
                 for (std::size_t i = 0; i < points.size(); ++i) {
                   const auto res =
                     lepski_select(terms, n, sel, points[i], kernel, t.config);
                   out.h[i] = res.h_selected;
                   out.estimates[i] = res.estimate;
                 }
               },
               [&](const FixedTuning& t) { fixed(t.delta, t.h); } },
             scenario.tuning);
  return out;
}

} // namespace

std::vector<Replicate>
run_replications(const Scenario& scenario,
                 std::span<const EvalPoint> points,
                 std::size_t n,
                 std::size_t replications,
                 std::uint64_t seed,
                 unsigned threads)
{
  validate(scenario);
  if (replications < 1)
    throw ParameterError("replications must be >= 1");
  if (points.empty())
    throw ParameterError("no evaluation points");
  if (n < 5)
    throw SampleSizeError("simulation needs n >= 5");
  const Kernel kernel(scenario.kernel, scenario.kernel_mode);
  std::vector<Replicate> out(replications);
  detail::parallel_for(replications, threads, [&](std::size_t r) {
    out[r] = run_one(scenario, kernel, points, n, r, seed);
  });
  return out;
}

double
mc_risk(const Scenario& scenario,
        EvalPoint a,
        std::size_t n,
        std::size_t replications,
        std::uint64_t seed,
        unsigned threads)
{
  const std::array<EvalPoint, 1> point{ a };
  const auto reps =
    run_replications(scenario, point, n, replications, seed, threads);
  const double truth = true_density(scenario.coeffs, a);
  double sum = 0.0;
  for (const auto& rep : reps) {
    const double e = rep.estimates[0] - truth;
    sum += e * e;
  }
  return sum / static_cast<double>(reps.size());
}

std::vector<double>
sup_errors(const Scenario& scenario,
           std::span<const EvalPoint> grid,
           std::size_t n,
           std::size_t replications,
           std::uint64_t seed,
           unsigned threads)
{
  const auto reps =
    run_replications(scenario, grid, n, replications, seed, threads);
  std::vector<double> truth(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    truth[i] = true_density(scenario.coeffs, grid[i]);
  std::vector<double> out;
  out.reserve(reps.size());
  for (const auto& rep : reps) {
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      worst = std::max(worst, std::abs(rep.estimates[i] - truth[i]));
    out.push_back(worst);
  }
  return out;
}

RiskReport
rate_fit(std::span<const std::pair<double, double>> n_mse,
         double alpha,
         double beta)
{
  std::vector<double> distinct;
  for (const auto& [n, mse] : n_mse) {
    if (!(n > 0.0) || !(mse > 0.0))
      throw ParameterError("rate fit needs positive n and mse");
    distinct.push_back(n);
  }
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 4)
    throw InsufficientDataError("rate fit needs at least 4 distinct sample sizes, got " +
                                std::to_string(distinct.size()));

  const double k = static_cast<double>(n_mse.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [n, mse] : n_mse) {
    mx += std::log(n);
    my += std::log(mse);
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [n, mse] : n_mse) {
    const double dx = std::log(n) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(mse) - my);
  }
  RiskReport out;
  out.slope = sxy / sxx;
  const double intercept = my - out.slope * mx;
  double rss = 0.0;
  for (const auto& [n, mse] : n_mse) {
    const double res = std::log(mse) - intercept - out.slope * std::log(n);
    rss += res * res;
  }
  out.slope_se = std::sqrt(rss / (k - 2.0) / sxx);
  out.theory_slope = theory_slope(alpha, beta);
  for (const auto& [n, mse] : n_mse) {
    out.n_values.push_back(n);
    out.mse.push_back(mse);
  }
  return out;
}

// ---------------------------------------------------------------------------

SpacingsBoundParams
spacings_bound_params(const DesignSpec& design)
{
  validate(design);
  const double beta = design.beta;
  auto ratio = [beta](double eps) { return angle_ratio(beta, eps); };

  // eps -> 0 limit of the ratio
  const double limit = 0.5 * (beta + 1.0);
  double lo = limit, hi = limit;
  double arg_lo = 0.0, arg_hi = 0.0;

  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i)
    grid.push_back(1e-8 * std::pow(1e6, i / 400.0)); // 1e-8 .. 1e-2
  for (int i = 1; i <= 20000; ++i)
    grid.push_back(1e-2 + (half_pi - 1e-2) * i / 20000.0);
  for (double eps : grid) {
    const double r = ratio(eps);
    if (r < lo) {
      lo = r;
      arg_lo = eps;
    }
    if (r > hi) {
      hi = r;
      arg_hi = eps;
    }
  }

  // polish interior extrema
  const double width = (half_pi - 1e-2) / 20000.0;
  auto polish = [&](double center, bool minimize) {
    const double a = std::max(1e-9, center - 2.0 * width);
    const double b = std::min(half_pi, center + 2.0 * width);
    auto f = [&](double e) { return minimize ? ratio(e) : -ratio(e); };
    const auto r = boost::math::tools::brent_find_minima(f, a, b, 52);
    return minimize ? r.second : -r.second;
  };
  if (arg_lo > 0.0)
    lo = std::min(lo, polish(arg_lo, true));
  if (arg_hi > 0.0)
    hi = std::max(hi, polish(arg_hi, false));
  return { lo, hi };
}

double
tail_power_integral(double delta, double exponent)
{
  if (!(delta > 0.0 && delta <= half_pi))
    throw ParameterError("tail integral needs 0 < delta <= pi/2");
  if (exponent == 1.0)
    return std::log(half_pi / delta);
  const double e = 1.0 - exponent;
  return (std::pow(half_pi, e) - std::pow(delta, e)) / e;
}

double
spacings_bound(const DesignSpec& design,
               const SpacingsBoundParams& params,
               std::size_t n,
               double delta,
               double kappa)
{
  if (n < 2)
    throw SampleSizeError("spacings bound needs n >= 2");
  if (!(kappa > 1.0))
    throw ParameterError("spacings bound needs kappa > 1");
  const double dn = static_cast<double>(n);
  return 2.0 * kappa * params.C_z * std::pow(params.c_z, -kappa) *
         std::tgamma(kappa) * dn * std::pow(dn - 1.0, -kappa) *
         tail_power_integral(delta, design.beta * (kappa - 1.0));
}

SpacingsCheck
spacings_bound_check(const DesignSpec& design,
                     std::size_t n,
                     double delta,
                     double kappa,
                     std::size_t replications,
                     std::uint64_t seed,
                     unsigned threads)
{
  validate(design);
  if (!(kappa > 1.0))
    throw ParameterError("spacings check needs kappa > 1");
  if (!(delta > 0.0 && delta <= pi / 4.0))
    throw ParameterError("spacings check needs 0 < delta <= pi/4");
  if (replications < 1)
    throw ParameterError("replications must be >= 1");
  if (n < 2)
    throw SampleSizeError("spacings check needs n >= 2");

  std::vector<double> sums(replications);
  detail::parallel_for(replications, threads, [&](std::size_t r) {
    auto rng = make_stream(seed, n, r);
    auto x = sample_design(design, n, rng);
    std::vector<double> z(n);
    std::transform(x.begin(), x.end(), z.begin(),
                   [](double v) { return std::atan(v); });
    const TransformedDataset data(std::move(z), std::vector<double>(n, 0.0));
    sums[r] = spacing_power_sum(data, delta, kappa);
  });

  SpacingsCheck out;
  out.params = spacings_bound_params(design);
  out.empirical = std::accumulate(sums.begin(), sums.end(), 0.0) /
                  static_cast<double>(replications);
  out.bound = spacings_bound(design, out.params, n, delta, kappa);
  out.holds = out.empirical <= out.bound;
  return out;
}

} // namespace rcdens
