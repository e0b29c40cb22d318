#include "rcdens/estimator.hpp"

#include "rcdens/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace rcdens {

void
validate(const EstimatorConfig& cfg)
{
  if (!(cfg.h > 0.0) || !std::isfinite(cfg.h))
    throw ParameterError("bandwidth h must be positive and finite, got " +
                         std::to_string(cfg.h));
  if (!(cfg.delta >= 0.0 && cfg.delta <= std::numbers::pi / 4.0))
    throw ParameterError("threshold delta must lie in [0, pi/4], got " +
                         std::to_string(cfg.delta));
}

WindowTerms::WindowTerms(const TransformedDataset& data, double delta)
{
  const auto win = window(data, delta);
  const auto count = win.active_count();
  u_.reserve(count);
  cos_z_.reserve(count);
  sin_z_.reserve(count);
  spacing_.reserve(count);
  for (auto j = win.first; j < win.last; ++j) {
    const double z = data.z()[j];
    u_.push_back(data.u()[j]);
    cos_z_.push_back(std::cos(z));
    sin_z_.push_back(std::sin(z));
    spacing_.push_back(data.spacing(j));
  }
}

double
WindowTerms::estimate(const Kernel& kernel, double h, EvalPoint a) const
{
  double sum = 0.0;
  for (std::size_t j = 0; j < u_.size(); ++j) {
    const double arg = u_[j] - a.a0 * cos_z_[j] - a.a1 * sin_z_[j];
    sum += kernel.eval_unchecked(arg, h) * spacing_[j];
  }
  return sum;
}

double
estimate_point(const TransformedDataset& data,
               const Kernel& kernel,
               const EstimatorConfig& cfg,
               EvalPoint a)
{
  validate(cfg);
  return WindowTerms(data, cfg.delta).estimate(kernel, cfg.h, a);
}

std::vector<double>
estimate_grid(const TransformedDataset& data,
              const Kernel& kernel,
              const EstimatorConfig& cfg,
              std::span<const EvalPoint> grid)
{
  validate(cfg);
  if (grid.empty())
    throw ParameterError("evaluation grid is empty");
  const WindowTerms terms(data, cfg.delta);
  std::vector<double> out;
  out.reserve(grid.size());
  for (const auto& a : grid)
    out.push_back(terms.estimate(kernel, cfg.h, a));
  return out;
}

std::vector<EvalPoint>
rectangular_grid(double a0_min, double a0_max, std::size_t a0_count,
                 double a1_min, double a1_max, std::size_t a1_count)
{
  if (a0_count == 0 || a1_count == 0)
    throw ParameterError("grid counts must be positive");
  auto coord = [](double lo, double hi, std::size_t count, std::size_t i) {
    return count == 1 ? lo
                      : lo + (hi - lo) * static_cast<double>(i) /
                               static_cast<double>(count - 1);
  };
  std::vector<EvalPoint> grid;
  grid.reserve(a0_count * a1_count);
  for (std::size_t j = 0; j < a1_count; ++j)
    for (std::size_t i = 0; i < a0_count; ++i)
      grid.push_back({ coord(a0_min, a0_max, a0_count, i),
                       coord(a1_min, a1_max, a1_count, j) });
  return grid;
}

} // namespace rcdens
