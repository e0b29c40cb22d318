#pragma once

#include "rcdens/estimator.hpp"
#include "rcdens/kernel.hpp"
#include "rcdens/transform.hpp"

#include <span>
#include <vector>

namespace rcdens {

//! Terms of the threshold selection criterion
//!   C_n(delta) = S2 + S3 / delta + (L_n + pi/2)^2 + (pi/2 - R_n)^2 + delta^2,
//! with S_k the sum of k-th powers of the spacings in the delta-window.
struct CriterionBreakdown
{
  double sum_sq = 0.0;
  double sum_cube_over_delta = 0.0;
  double left_gap_sq = 0.0;
  double right_gap_sq = 0.0;
  double delta_sq = 0.0;
  double total = 0.0;
};

CriterionBreakdown criterion(const TransformedDataset& data, double delta);

struct DeltaSelection
{
  double delta_hat = 0.0;
  double criterion_value = 0.0;
  //! Number of candidate thresholds compared.
  std::size_t candidate_count = 0;
};

//! Admissible thresholds [n^-1/2, pi/4].
std::pair<double, double> delta_range(std::size_t n);

//! Points in [n^-1/2, pi/4] where C_n may jump: pi/2 - |Z_j|.
std::vector<double> criterion_breakpoints(const TransformedDataset& data);

//! Minimizes C_n over [n^-1/2, pi/4] piece by piece. Between breakpoints
//! only S3 / delta + delta^2 varies, minimized at (S3 / 2)^(1/3). Ties go to
//! the smallest threshold. Requires n >= 5.
DeltaSelection select_delta(const TransformedDataset& data);

//! h = criterion_value^(1 / (2 (alpha + 2))).
double select_h_known_alpha(double criterion_value, double alpha);

struct LepskiConfig
{
  double q = 1.25;
  double kappa_le = 400.0;
};

struct LepskiStep
{
  int k;
  double h;
  double estimate;
  double sigma;
};

struct LepskiResult
{
  int k_hat = 0;
  double h_selected = 0.0;
  double estimate = 0.0;
  DeltaSelection delta;
  std::vector<LepskiStep> steps;
  std::vector<int> accepted_set;
};

//! Largest index K = floor(log_q n) of the bandwidth grid.
int lepski_grid_size(std::size_t n, double q);

//! Indices k with |f_k - f_l|^2 <= kappa sigma_l for every l <= k.
std::vector<int> lepski_accepted(std::span<const double> estimates,
                                 std::span<const double> sigma,
                                 double kappa_le);

//! Bandwidths h_k = delta_hat^(1/2) q^k, k = 0..K, with thresholds
//! sigma(k, n) = h_k^-4 C_n(delta_hat) log n, and the selected index
//! k_hat = max of the accepted set.
LepskiResult lepski_select(const TransformedDataset& data,
                           EvalPoint a,
                           const Kernel& kernel,
                           const LepskiConfig& cfg);

//! Same with a precomputed threshold selection and window.
LepskiResult lepski_select(const WindowTerms& terms,
                           std::size_t n,
                           const DeltaSelection& delta,
                           EvalPoint a,
                           const Kernel& kernel,
                           const LepskiConfig& cfg);

} // namespace rcdens
