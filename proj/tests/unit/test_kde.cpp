#include "knnclust/error.hpp"
#include "knnclust/kde.hpp"

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace knnclust;

namespace {

const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

//! Direct evaluation of the Gaussian estimator.
double naive_kde(const PointCloud& c, double h, std::span<const double> x)
{
  const auto d = c.dimension();
  double s = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    double r2 = 0.0;
    for (std::size_t a = 0; a < d; ++a)
      r2 += std::pow((x[a] - c[j][a]) / h, 2);
    s += std::pow(2.0 * std::numbers::pi, -0.5 * d) * std::exp(-0.5 * r2);
  }
  return s / (c.size() * std::pow(h, d));
}

DensityModel unit_interval()
{
  return make_ball_mixture(1, { { { 0.0 }, 0.5, 1.0 } });
}

double median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

} // namespace

TEST_CASE("single point and coincident points")
{
  const auto one = fixture::line({ 0.3 });
  CHECK(kde_at_samples(one, 1.0).values[0] == doctest::Approx(0.39894).epsilon(1e-5));
  CHECK(kde_at_samples(one, 1.0).values[0] == doctest::Approx(inv_sqrt_2pi).epsilon(1e-15));

  const auto two = fixture::line({ 1.0, 1.0 });
  const auto e = kde_at_samples(two, 1.0);
  CHECK(e.values[0] == doctest::Approx(inv_sqrt_2pi).epsilon(1e-15));
  CHECK(e.values[1] == doctest::Approx(inv_sqrt_2pi).epsilon(1e-15));

  CHECK_THROWS_AS(kde_at_samples(one, 0.0), Error);
  CHECK_THROWS_AS(kde_at_samples(one, -1.0), Error);
}

TEST_CASE("estimator matches direct evaluation")
{
  for (std::size_t d : { 1u, 2u, 3u }) {
    const auto c = oracle::random_cloud(150, d, 10 + d);
    const double h = 0.3;
    const auto e = kde_at_samples(c, h);
    for (std::size_t i = 0; i < c.size(); ++i) {
      CHECK(e.values[i] == doctest::Approx(naive_kde(c, h, c[i])).epsilon(1e-12));
      CHECK(e.values[i] >= inv_sqrt_2pi * std::pow(inv_sqrt_2pi, d - 1) / (c.size() * std::pow(h, d)));
      CHECK(kde_evaluate(c, h, c[i]) == doctest::Approx(e.values[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("permutation leaves estimates unchanged")
{
  const auto c = oracle::random_cloud(200, 2, 4);
  std::vector<std::size_t> perm(c.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(8));
  const auto a = kde_at_samples(c, 0.2);
  const auto b = kde_at_samples(c.permuted(perm), 0.2);
  for (std::size_t i = 0; i < c.size(); ++i)
    CHECK(b.values[i] == doctest::Approx(a.values[perm[i]]).epsilon(1e-12));
}

TEST_CASE("estimator integrates to one")
{
  const auto c = sample(unit_interval(), 100, 3);
  const double h = 0.1;
  // Trapezoid rule on [-3, 3].
  const int steps = 6000;
  double sum = 0.0;
  for (int s = 0; s <= steps; ++s) {
    const double x = -3.0 + 6.0 * s / steps;
    const double w = (s == 0 || s == steps) ? 0.5 : 1.0;
    sum += w * kde_evaluate(c, h, std::vector{ x });
  }
  CHECK(sum * 6.0 / steps == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("uniform density recovered at the centre")
{
  const auto m = unit_interval();
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto c = sample(m, 10000, seed);
    const double v = kde_evaluate(c, 0.05, std::vector{ 0.0 });
    CHECK(std::abs(v - 1.0) <= 0.1);
    total += v;
  }
  CHECK(std::abs(total / 20 - 1.0) <= 0.05);
}

TEST_CASE("sup_error")
{
  const auto m = unit_interval();
  const auto c = sample(m, 300, 5);
  DensityEstimate exact{ std::vector<double>(c.size()), 0.1, Kernel::Gaussian };
  for (std::size_t i = 0; i < c.size(); ++i)
    exact.values[i] = density_at(m, c[i]);
  CHECK(sup_error(m, c, exact).all == 0.0);

  const auto e = kde_at_samples(c, 0.1);
  const auto s = sup_error(m, c, e);
  CHECK(s.all >= std::abs(e.values[0] - density_at(m, c[0])));
  CHECK(s.interior <= s.all);
  CHECK(s.interior_count <= c.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    CHECK(s.all >= std::abs(e.values[i] - density_at(m, c[i])));
}

TEST_CASE("interior sup error is small for the uniform model")
{
  const auto m = unit_interval();
  int good = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto c = sample(m, 10000, 100 + seed);
    const auto e = kde_at_samples(c, 0.05);
    good += sup_error(m, c, e).interior < 0.1 ? 1 : 0;
  }
  CHECK(good >= 18);
}

TEST_CASE("exact identification schedule")
{
  const double n = std::exp(2.0);
  const auto s = exact_id_schedule(n, 1, 1.0, 1.0);
  CHECK(s.h == doctest::Approx(std::pow(2.0 / std::exp(2.0), 0.2)).epsilon(1e-14));
  CHECK(s.h == doctest::Approx(0.7700).epsilon(1e-4));

  for (double nn : { 10.0, 100.0, 5000.0 }) {
    const auto t = exact_id_schedule(nn, 3, 0.7, 0.49);
    CHECK(t.eps == doctest::Approx(t.h * t.h).epsilon(1e-14));
    CHECK(exact_id_schedule(2 * nn, 3, 0.7, 0.49).h < t.h);
    // eps / h^2 = eps0 / h0^2 for every n.
    const auto u = exact_id_schedule(nn, 2, 0.3, 1.2);
    CHECK(u.eps / (u.h * u.h) == doctest::Approx(1.2 / 0.09).epsilon(1e-12));
  }
  CHECK_THROWS_AS(exact_id_schedule(1.0, 2, 1.0, 1.0), Error);
  CHECK_THROWS_AS(exact_id_schedule(10.0, 2, 0.0, 1.0), Error);
}

TEST_CASE("sup error decays with n under the schedule")
{
  const auto m = unit_interval();
  auto med = [&](std::size_t n) {
    std::vector<double> v;
    const double h = exact_id_schedule(double(n), 1, 0.1, 1.0).h;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto c = sample(m, n, 1000 * n + seed);
      v.push_back(sup_error(m, c, kde_at_samples(c, h)).interior);
    }
    return median(v);
  };
  CHECK(med(4000) < med(500));
}
