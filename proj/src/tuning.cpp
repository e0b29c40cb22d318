#include "rcdens/tuning.hpp"

#include "rcdens/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace rcdens {

namespace {

constexpr double half_pi = std::numbers::pi / 2.0;
constexpr double quarter_pi = std::numbers::pi / 4.0;

// Criterion evaluation through prefix sums, used to rank candidates.
class FastCriterion
{
public:
  explicit FastCriterion(const TransformedDataset& data)
    : z_(data.z())
  {
    sq_.assign(z_.size(), 0.0);
    cube_.assign(z_.size(), 0.0);
    for (std::size_t j = 0; j + 1 < z_.size(); ++j) {
      const double s = data.spacing(j);
      sq_[j + 1] = sq_[j] + s * s;
      cube_[j + 1] = cube_[j] + s * s * s;
    }
  }

  // S3 of the window at delta
  double cube_sum(double delta) const
  {
    auto [lo, hi] = bounds(delta);
    return hi < lo + 2 ? 0.0 : cube_[hi - 1] - cube_[lo];
  }

  double total(double delta) const
  {
    auto [lo, hi] = bounds(delta);
    if (hi < lo + 2)
      return delta * delta;
    const double left = z_[lo] + half_pi;
    const double right = half_pi - z_[hi - 1];
    return (sq_[hi - 1] - sq_[lo]) + (cube_[hi - 1] - cube_[lo]) / delta +
           left * left + right * right + delta * delta;
  }

private:
  std::pair<std::size_t, std::size_t> bounds(double delta) const
  {
    const auto lo = static_cast<std::size_t>(
      std::lower_bound(z_.begin(), z_.end(), -half_pi + delta) - z_.begin());
    const auto hi = static_cast<std::size_t>(
      std::upper_bound(z_.begin(), z_.end(), half_pi - delta) - z_.begin());
    return { lo, hi };
  }

  std::span<const double> z_;
  std::vector<double> sq_;
  std::vector<double> cube_;
};

} // namespace

CriterionBreakdown
criterion(const TransformedDataset& data, double delta)
{
  if (!(delta > 0.0 && delta <= quarter_pi))
    throw ParameterError("criterion threshold must lie in (0, pi/4], got " +
                         std::to_string(delta));
  const auto win = window(data, delta);
  CriterionBreakdown out;
  double cubes = 0.0;
  for (auto j = win.first; j < win.last; ++j) {
    const double s = data.spacing(j);
    out.sum_sq += s * s;
    cubes += s * s * s;
  }
  out.sum_cube_over_delta = cubes / delta;
  out.left_gap_sq = (win.left + half_pi) * (win.left + half_pi);
  out.right_gap_sq = (half_pi - win.right) * (half_pi - win.right);
  out.delta_sq = delta * delta;
  out.total = out.sum_sq + out.sum_cube_over_delta + out.left_gap_sq +
              out.right_gap_sq + out.delta_sq;
  return out;
}

std::pair<double, double>
delta_range(std::size_t n)
{
  return { 1.0 / std::sqrt(static_cast<double>(n)), quarter_pi };
}

std::vector<double>
criterion_breakpoints(const TransformedDataset& data)
{
  const auto [lo, hi] = delta_range(data.size());
  std::vector<double> points;
  for (double z : data.z()) {
    const double b = half_pi - std::abs(z);
    if (b >= lo && b <= hi)
      points.push_back(b);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

DeltaSelection
select_delta(const TransformedDataset& data)
{
  const auto n = data.size();
  if (n < 5)
    throw SampleSizeError("threshold selection needs n >= 5, got " +
                          std::to_string(n));
  const auto [lo, hi] = delta_range(n);
  const FastCriterion fast(data);

  std::vector<double> edges{ lo };
  for (double b : criterion_breakpoints(data))
    if (b > lo && b < hi)
      edges.push_back(b);
  edges.push_back(hi);

  // Candidates: both sides of every edge and the smooth optimum of each piece.
  std::vector<double> candidates;
  candidates.reserve(4 * edges.size());
  auto add = [&](double d) {
    if (d >= lo && d <= hi)
      candidates.push_back(d);
  };
  for (std::size_t i = 0; i < edges.size(); ++i) {
    add(edges[i]);
    add(std::nextafter(edges[i], 0.0));
    add(std::nextafter(edges[i], 1.0));
    if (i + 1 < edges.size()) {
      const double a = edges[i];
      const double b = edges[i + 1];
      const double s3 = fast.cube_sum(0.5 * (a + b));
      if (s3 > 0.0)
        add(std::clamp(std::cbrt(0.5 * s3), a, b));
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  // Rank by the prefix-sum value, then settle the leaders exactly.
  std::vector<std::pair<double, double>> ranked;
  ranked.reserve(candidates.size());
  for (double d : candidates)
    ranked.emplace_back(fast.total(d), d);
  const std::size_t keep = std::min<std::size_t>(16, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + keep, ranked.end());

  DeltaSelection best;
  best.criterion_value = std::numeric_limits<double>::infinity();
  best.candidate_count = candidates.size();
  for (std::size_t i = 0; i < keep; ++i) {
    const double d = ranked[i].second;
    const double value = criterion(data, d).total;
    if (value < best.criterion_value ||
        (value == best.criterion_value && d < best.delta_hat)) {
      best.criterion_value = value;
      best.delta_hat = d;
    }
  }
  return best;
}

double
select_h_known_alpha(double criterion_value, double alpha)
{
  if (!(criterion_value > 0.0) || !std::isfinite(criterion_value))
    throw ParameterError("criterion value must be positive");
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw ParameterError("smoothness alpha must be positive");
  return std::pow(criterion_value, 1.0 / (2.0 * (alpha + 2.0)));
}

int
lepski_grid_size(std::size_t n, double q)
{
  if (!(q > 1.0))
    throw ParameterError("Lepski grid ratio q must exceed 1");
  const double dn = static_cast<double>(n);
  double k = std::floor(std::log(dn) / std::log(q));
  // log(n) / log(q) may land an ulp away from an integer
  if (std::pow(q, k + 1.0) <= dn)
    k += 1.0;
  else if (k > 0.0 && std::pow(q, k) > dn)
    k -= 1.0;
  return static_cast<int>(std::max(0.0, k));
}

std::vector<int>
lepski_accepted(std::span<const double> estimates,
                std::span<const double> sigma,
                double kappa_le)
{
  std::vector<int> accepted;
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    bool ok = true;
    for (std::size_t l = 0; l <= k && ok; ++l) {
      const double d = estimates[k] - estimates[l];
      ok = d * d <= kappa_le * sigma[l];
    }
    if (ok)
      accepted.push_back(static_cast<int>(k));
  }
  return accepted;
}

LepskiResult
lepski_select(const WindowTerms& terms,
              std::size_t n,
              const DeltaSelection& delta,
              EvalPoint a,
              const Kernel& kernel,
              const LepskiConfig& cfg)
{
  if (!(cfg.kappa_le > 0.0))
    throw ParameterError("Lepski constant kappa_le must be positive");
  const int K = lepski_grid_size(n, cfg.q);
  const double log_n = std::log(static_cast<double>(n));
  const double h0 = std::sqrt(delta.delta_hat);

  LepskiResult out;
  out.delta = delta;
  std::vector<double> estimates(K + 1), sigma(K + 1);
  for (int k = 0; k <= K; ++k) {
    const double h = k == 0 ? h0 : h0 * std::pow(cfg.q, k);
    estimates[k] = terms.estimate(kernel, h, a);
    sigma[k] = delta.criterion_value * log_n / (h * h * h * h);
    out.steps.push_back({ k, h, estimates[k], sigma[k] });
  }
  out.accepted_set = lepski_accepted(estimates, sigma, cfg.kappa_le);
  out.k_hat = out.accepted_set.back();
  out.h_selected = out.steps[out.k_hat].h;
  out.estimate = estimates[out.k_hat];
  return out;
}

LepskiResult
lepski_select(const TransformedDataset& data,
              EvalPoint a,
              const Kernel& kernel,
              const LepskiConfig& cfg)
{
  const auto delta = select_delta(data);
  const WindowTerms terms(data, delta.delta_hat);
  return lepski_select(terms, data.size(), delta, a, kernel, cfg);
}

} // namespace rcdens
