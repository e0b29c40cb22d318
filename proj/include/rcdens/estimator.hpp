#pragma once

#include "rcdens/kernel.hpp"
#include "rcdens/transform.hpp"

#include <span>
#include <vector>

namespace rcdens {

struct EvalPoint
{
  double a0;
  double a1;
};

//! Bandwidth h > 0 and threshold 0 <= delta <= pi/4.
struct EstimatorConfig
{
  double h;
  double delta;
};

void validate(const EstimatorConfig& cfg);

//! Priestley-Chao spacings estimate of the coefficient density at `a`:
//!
//!   sum_j K(U_[j] - a0 cos Z_(j) - a1 sin Z_(j); h) (Z_(j+1) - Z_(j))
//!
//! over the delta-window. Zero on an empty window. The result is signed;
//! no clipping is applied.
double estimate_point(const TransformedDataset& data,
                      const Kernel& kernel,
                      const EstimatorConfig& cfg,
                      EvalPoint a);

std::vector<double> estimate_grid(const TransformedDataset& data,
                                  const Kernel& kernel,
                                  const EstimatorConfig& cfg,
                                  std::span<const EvalPoint> grid);

//! Per-observation quantities of the delta-window, shared across
//! evaluation points and bandwidths.
class WindowTerms
{
public:
  WindowTerms(const TransformedDataset& data, double delta);

  //! Estimate at `a` with bandwidth h (no argument checks).
  double estimate(const Kernel& kernel, double h, EvalPoint a) const;

  std::size_t size() const { return u_.size(); }

private:
  std::vector<double> u_;
  std::vector<double> cos_z_;
  std::vector<double> sin_z_;
  std::vector<double> spacing_;
};

//! Rectangular grid, a0 varying fastest.
std::vector<EvalPoint> rectangular_grid(double a0_min, double a0_max,
                                        std::size_t a0_count,
                                        double a1_min, double a1_max,
                                        std::size_t a1_count);

} // namespace rcdens
