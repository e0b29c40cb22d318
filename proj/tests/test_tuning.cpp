#include "oracles.hpp"
#include "rcdens/errors.hpp"
#include "rcdens/tuning.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace rcdens;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

TransformedDataset
angles(std::vector<double> z)
{
  std::vector<double> u(z.size(), 0.0);
  return TransformedDataset(std::move(z), std::move(u));
}

TransformedDataset
random_angles(std::size_t n, std::uint64_t seed, double spread = 2.0)
{
  std::mt19937_64 rng(seed);
  std::cauchy_distribution<double> C(0.0, spread);
  std::vector<double> z(n);
  for (auto& v : z)
    v = std::atan(C(rng));
  return angles(z);
}

std::vector<double>
sorted_z(const TransformedDataset& t)
{
  return { t.z().begin(), t.z().end() };
}

} // namespace

TEST_CASE("criterion worked example")
{
  const auto b = criterion(angles({ -1.0, 0.0, 1.0 }), 0.5);
  CHECK(b.sum_sq == Approx(2.0).epsilon(1e-15));
  CHECK(b.sum_cube_over_delta == Approx(4.0).epsilon(1e-15));
  const double gap = (pi / 2 - 1.0) * (pi / 2 - 1.0);
  CHECK(b.left_gap_sq == Approx(gap).epsilon(1e-14));
  CHECK(b.right_gap_sq == Approx(gap).epsilon(1e-14));
  CHECK(b.delta_sq == 0.25);
  CHECK(b.total == Approx(6.25 + 2 * gap).epsilon(1e-15));
  CHECK(b.total == Approx(6.9016).margin(1e-4));
}

TEST_CASE("criterion conventions")
{
  const auto b = criterion(angles({ -1.5, 1.5 }), 0.3);
  CHECK(b.total == Approx(0.09).epsilon(1e-15));
  CHECK(b.sum_sq == 0.0);
  CHECK_THROWS_AS(criterion(angles({ 0.0, 0.1 }), 0.0), ParameterError);
  CHECK_THROWS_AS(criterion(angles({ 0.0, 0.1 }), 0.8), ParameterError);
}

TEST_CASE("criterion matches oracle and sums its fields")
{
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto t = random_angles(40, seed);
    for (double d : { 0.05, 0.2, 0.5, pi / 4 }) {
      const auto b = criterion(t, d);
      CHECK(b.total == Approx(oracle::criterion(sorted_z(t), d)).epsilon(1e-13));
      CHECK(b.total == Approx(b.sum_sq + b.sum_cube_over_delta + b.left_gap_sq +
                              b.right_gap_sq + b.delta_sq)
                         .epsilon(1e-15));
      CHECK(b.sum_sq >= 0.0);
      CHECK(b.left_gap_sq >= 0.0);
      CHECK(b.right_gap_sq >= 0.0);
    }
  }
}

TEST_CASE("breakpoints are the discontinuity sites")
{
  const auto t = random_angles(30, 4);
  const auto bp = criterion_breakpoints(t);
  const auto [lo, hi] = delta_range(t.size());
  for (double b : bp) {
    CHECK(b >= lo);
    CHECK(b <= hi);
  }
  std::size_t expected = 0;
  for (double z : t.z()) {
    const double site = pi / 2 - std::abs(z);
    if (site >= lo && site <= hi)
      ++expected;
  }
  CHECK(bp.size() <= expected);
  CHECK(bp.size() >= 1);
}

TEST_CASE("select_delta beats a dense grid scan")
{
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const std::size_t n = 5 + seed * 2;
    const auto t = random_angles(n, 100 + seed);
    const auto sel = select_delta(t);
    const auto [lo, hi] = delta_range(n);
    CHECK(sel.delta_hat >= lo);
    CHECK(sel.delta_hat <= hi);
    const auto z = sorted_z(t);
    double best = INFINITY;
    for (int i = 0; i < 20000; ++i)
      best = std::min(best, oracle::criterion(z, lo + (hi - lo) * i / 19999.0));
    CHECK(oracle::criterion(z, sel.delta_hat) <=
          best + std::exp(-static_cast<double>(n)));
    CHECK(sel.criterion_value == Approx(criterion(t, sel.delta_hat).total));
  }
  CHECK_THROWS_AS(select_delta(random_angles(4, 1)), SampleSizeError);
}

TEST_CASE("interior optimum when all angles are central")
{
  const std::vector<double> z{ -0.77, -0.38, 0.0, 0.39, 0.76 };
  const auto t = angles(z);
  const auto sel = select_delta(t);
  double s3 = 0.0;
  for (std::size_t j = 0; j + 1 < z.size(); ++j)
    s3 += std::pow(t.spacing(j), 3);
  const double star = std::cbrt(s3 / 2.0);
  REQUIRE(star >= delta_range(z.size()).first);
  CHECK(sel.delta_hat == Approx(star).epsilon(1e-12));
}

TEST_CASE("bandwidth from known smoothness")
{
  CHECK(select_h_known_alpha(1.0, 3.7) == 1.0);
  CHECK(select_h_known_alpha(0.01, 2.0) == Approx(0.56234).epsilon(1e-5));
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto sel = select_delta(random_angles(200, seed));
    for (double alpha : { 0.5, 2.0, 6.0 }) {
      const double h = select_h_known_alpha(sel.criterion_value, alpha);
      CHECK(h * h >= sel.delta_hat);
    }
  }
  CHECK_THROWS_AS(select_h_known_alpha(0.0, 2.0), ParameterError);
  CHECK_THROWS_AS(select_h_known_alpha(0.5, 0.0), ParameterError);
}

TEST_CASE("Lepski grid size")
{
  CHECK(lepski_grid_size(5, 1.25) == 7);
  CHECK(lepski_grid_size(100000, 10.0) == 5);
  CHECK(lepski_grid_size(99999, 10.0) == 4);
  CHECK(lepski_grid_size(1, 1.25) == 0);
}

TEST_CASE("Lepski accepted set against brute force")
{
  const std::vector<double> sigma{ 1.0, 0.5, 0.25, 0.125, 0.0625, 0.03 };
  const double kappa = 1.0;

  SECTION("all equal")
  {
    const std::vector<double> f(6, 0.3);
    const auto acc = lepski_accepted(f, sigma, kappa);
    CHECK(acc.size() == 6);
    CHECK(acc.back() == 5);
  }
  SECTION("persistent violation")
  {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.5, 1.5);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> f(6);
      for (auto& v : f)
        v = U(rng);
      std::vector<int> brute;
      for (int k = 0; k < 6; ++k) {
        bool ok = true;
        for (int l = 0; l <= k; ++l)
          ok = ok && (f[k] - f[l]) * (f[k] - f[l]) <= kappa * sigma[l];
        if (ok)
          brute.push_back(k);
      }
      CHECK(lepski_accepted(f, sigma, kappa) == brute);
    }
  }
}

TEST_CASE("Lepski selection on data")
{
  std::mt19937_64 rng(8);
  std::cauchy_distribution<double> C;
  std::vector<double> z, u;
  for (int i = 0; i < 400; ++i) {
    z.push_back(std::atan(C(rng)));
    u.push_back(C(rng) * std::cos(z.back()) + C(rng) * std::sin(z.back()));
  }
  const TransformedDataset t(z, u);
  const Kernel k(make_weight(4));
  const auto res = lepski_select(t, { 0.0, 0.0 }, k, LepskiConfig{});
  const int K = lepski_grid_size(400, 1.25);
  REQUIRE(res.steps.size() == static_cast<std::size_t>(K + 1));
  CHECK(res.accepted_set.front() == 0);
  CHECK(res.k_hat == res.accepted_set.back());
  CHECK(res.h_selected == res.steps[res.k_hat].h);
  CHECK(res.estimate == res.steps[res.k_hat].estimate);
  CHECK(res.steps[0].h == Approx(std::sqrt(res.delta.delta_hat)));
  for (int i = 1; i <= K; ++i) {
    CHECK(res.steps[i].sigma < res.steps[i - 1].sigma);
    CHECK(res.steps[i].h == Approx(res.steps[0].h * std::pow(1.25, i)));
  }
  const EstimatorConfig cfg{ res.h_selected, res.delta.delta_hat };
  CHECK(res.estimate == Approx(estimate_point(t, k, cfg, { 0.0, 0.0 })));

  CHECK_THROWS_AS(lepski_select(t, { 0.0, 0.0 }, k, LepskiConfig{ 1.0, 400 }),
                  ParameterError);
}

TEST_CASE("Lepski with a single candidate")
{
  // q large enough that K = 0
  const auto t = random_angles(6, 2);
  const Kernel k(make_weight(2));
  const auto res = lepski_select(t, { 0.0, 0.0 }, k, LepskiConfig{ 10.0, 400 });
  CHECK(res.k_hat == 0);
  CHECK(res.accepted_set == std::vector<int>{ 0 });
}
