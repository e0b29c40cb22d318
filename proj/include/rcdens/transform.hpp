#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace rcdens {

struct Observation
{
  double x;
  double y;
};

//! Raw regressor/response pairs (X_j, Y_j). Holds at least two finite pairs.
class Dataset
{
public:
  explicit Dataset(std::vector<Observation> pairs);

  std::span<const Observation> pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }

private:
  std::vector<Observation> pairs_;
};

//! Polar form (Z, U) of a dataset, sorted by angle.
//!
//! z()[j] is the j-th order statistic of Z and u()[j] the U-value paired
//! with it. Immutable after construction.
class TransformedDataset
{
public:
  //! Sorts the pairs stably by z. Every z must lie strictly inside
  //! (-pi/2, pi/2) and every u must be finite.
  TransformedDataset(std::vector<double> z, std::vector<double> u);

  std::span<const double> z() const { return z_; }
  std::span<const double> u() const { return u_; }
  std::size_t size() const { return z_.size(); }

  //! Z_(j+1) - Z_(j), for j < size() - 1.
  double spacing(std::size_t j) const { return z_[j + 1] - z_[j]; }

private:
  std::vector<double> z_;
  std::vector<double> u_;
};

//! Observations retained by the threshold delta.
//!
//! Pairs j in [first, last) are those with
//! -pi/2 + delta <= Z_(j) <= Z_(j+1) <= pi/2 - delta. When fewer than two
//! observations fall inside the window the range is empty and
//! left/right are -pi/2 and pi/2.
struct WindowInfo
{
  double delta;
  double left;
  double right;
  std::size_t first;
  std::size_t last;
  bool is_empty;

  std::size_t active_count() const { return last - first; }
};

TransformedDataset to_polar(const Dataset& data);

WindowInfo window(const TransformedDataset& data, double delta);

//! Sum of (Z_(j+1) - Z_(j))^kappa over the delta-window; 0 on an empty window.
double spacing_power_sum(const TransformedDataset& data,
                         double delta,
                         double kappa);

//! Reads two-column `x,y` CSV. A non-numeric first line is taken as a
//! header; any later non-numeric row raises InvalidDataError naming the line.
Dataset read_csv(std::istream& in);
Dataset read_csv(const std::filesystem::path& path);

} // namespace rcdens
