#include "rcdens/transform.hpp"

#include "rcdens/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>

namespace rcdens {

namespace {

constexpr double half_pi = std::numbers::pi / 2.0;

std::string_view
trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool
parse_double(std::string_view field, double& value)
{
  field = trim(field);
  if (field.empty())
    return false;
  if (field.front() == '+')
    field.remove_prefix(1);
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  return ec == std::errc() && ptr == end;
}

} // namespace

Dataset::Dataset(std::vector<Observation> pairs)
  : pairs_(std::move(pairs))
{
  if (pairs_.size() < 2)
    throw SampleSizeError("dataset needs at least 2 observations, got " +
                          std::to_string(pairs_.size()));
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (!std::isfinite(pairs_[i].x) || !std::isfinite(pairs_[i].y))
      throw InvalidDataError("observation " + std::to_string(i + 1) +
                             " has a non-finite coordinate");
  }
}

TransformedDataset::TransformedDataset(std::vector<double> z,
                                       std::vector<double> u)
{
  if (z.size() != u.size())
    throw InvalidDataError("z and u must have equal length");
  if (z.size() < 2)
    throw SampleSizeError("transformed dataset needs at least 2 points");
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(std::abs(z[i]) < half_pi))
      throw InvalidDataError("angle " + std::to_string(i + 1) +
                             " is not strictly inside (-pi/2, pi/2)");
    if (!std::isfinite(u[i]))
      throw InvalidDataError("u value " + std::to_string(i + 1) +
                             " is not finite");
  }

  std::vector<std::size_t> order(z.size());
  std::iota(order.begin(), order.end(), std::size_t{ 0 });
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return z[a] < z[b];
  });
  z_.reserve(z.size());
  u_.reserve(u.size());
  for (auto i : order) {
    z_.push_back(z[i]);
    u_.push_back(u[i]);
  }
}

TransformedDataset
to_polar(const Dataset& data)
{
  std::vector<double> z;
  std::vector<double> u;
  z.reserve(data.size());
  u.reserve(data.size());
  for (const auto& [x, y] : data.pairs()) {
    const double zi = std::atan(x);
    // atan saturates at the double nearest pi/2 for |x| above ~1e16.
    if (!(std::abs(zi) < half_pi))
      throw InvalidDataError("regressor value " + std::to_string(x) +
                             " maps onto the boundary angle +-pi/2");
    z.push_back(zi);
    u.push_back(y / std::sqrt(1.0 + x * x));
  }
  return TransformedDataset(std::move(z), std::move(u));
}

WindowInfo
window(const TransformedDataset& data, double delta)
{
  if (!(delta >= 0.0 && delta < half_pi))
    throw ParameterError("threshold delta must lie in [0, pi/2), got " +
                         std::to_string(delta));

  const auto z = data.z();
  const double lower = -half_pi + delta;
  const double upper = half_pi - delta;
  const auto lo = static_cast<std::size_t>(
    std::lower_bound(z.begin(), z.end(), lower) - z.begin());
  const auto hi = static_cast<std::size_t>(
    std::upper_bound(z.begin(), z.end(), upper) - z.begin());

  if (hi < lo + 2)
    return WindowInfo{ delta, -half_pi, half_pi, 0, 0, true };
  return WindowInfo{ delta, z[lo], z[hi - 1], lo, hi - 1, false };
}

double
spacing_power_sum(const TransformedDataset& data, double delta, double kappa)
{
  if (!(kappa >= 1.0))
    throw ParameterError("spacing exponent kappa must be >= 1");
  const auto win = window(data, delta);
  double sum = 0.0;
  for (auto j = win.first; j < win.last; ++j)
    sum += std::pow(data.spacing(j), kappa);
  return sum;
}

Dataset
read_csv(std::istream& in)
{
  std::vector<Observation> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty())
      continue;
    const auto comma = text.find(',');
    double x = 0.0;
    double y = 0.0;
    const bool ok = comma != std::string_view::npos &&
                    text.find(',', comma + 1) == std::string_view::npos &&
                    parse_double(text.substr(0, comma), x) &&
                    parse_double(text.substr(comma + 1), y);
    if (!ok) {
      if (line_no == 1 && pairs.empty())
        continue; // header
      throw InvalidDataError("line " + std::to_string(line_no) +
                             ": expected two numeric fields `x,y`, got '" +
                             std::string(text) + "'");
    }
    if (!std::isfinite(x) || !std::isfinite(y))
      throw InvalidDataError("line " + std::to_string(line_no) +
                             ": non-finite value");
    pairs.push_back({ x, y });
  }
  return Dataset(std::move(pairs));
}

Dataset
read_csv(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw InvalidDataError("cannot open input file " + path.string());
  return read_csv(in);
}

} // namespace rcdens
