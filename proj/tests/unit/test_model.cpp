#include "knnclust/error.hpp"
#include "knnclust/model.hpp"

#include "../support/fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace knnclust;

namespace {

double circle_lens(double r, double u, double d)
{
  const double a = r * r * std::acos((d * d + r * r - u * u) / (2 * d * r));
  const double b = u * u * std::acos((d * d + u * u - r * r) / (2 * d * u));
  const double c = 0.5 * std::sqrt((-d + r + u) * (d + r - u) * (d - r + u) * (d + r + u));
  return a + b - c;
}

double sphere_lens(double R, double r, double d)
{
  return std::numbers::pi * std::pow(R + r - d, 2) *
         (d * d + 2 * d * r - 3 * r * r + 2 * d * R + 6 * r * R - 3 * R * R) / (12 * d);
}

double halton(std::size_t i, unsigned base)
{
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

} // namespace

TEST_CASE("unit ball volume")
{
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi).epsilon(1e-14));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 / 3.0 * std::numbers::pi).epsilon(1e-14));
  for (int d = 1; d <= 12; ++d)
    CHECK(std::abs(unit_ball_volume(d) - std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1)) <= 1e-12);
}

TEST_CASE("make_ball_mixture densities")
{
  const auto m = fixture::two_disks();
  CHECK(m.component_density(0) == doctest::Approx(fixture::two_disk_density).epsilon(1e-14));
  CHECK(m.component_density(1) == doctest::Approx(0.6366).epsilon(1e-4));

  const auto line = make_ball_mixture(1, { { { 0.0 }, 0.5, 1.0 } });
  CHECK(line.component_density(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(density_at(line, std::vector{ 0.49 }) == doctest::Approx(1.0));
  CHECK(density_at(line, std::vector{ 0.51 }) == 0.0);
}

TEST_CASE("make_ball_mixture validation")
{
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code([] { make_ball_mixture(2, { { { 0, 0 }, 1, 0.5 }, { { 1.5, 0 }, 1, 0.5 } }); }) ==
        ErrorCode::OverlappingComponents);
  CHECK(code([] { make_ball_mixture(2, { { { 0, 0 }, 1, 0.5 }, { { 3, 0 }, 1, 0.4 } }); }) ==
        ErrorCode::BadMass);
  CHECK(code([] { make_ball_mixture(2, { { { 0, 0, 0 }, 1, 1.0 } }); }) ==
        ErrorCode::DimensionMismatch);
  // A box that cuts through a ball.
  CHECK(code([] {
          make_ball_mixture(2, { { { 0, 0 }, 1, 0.9 } }, Background{ { { 0.5, -2 }, { 3, 2 } }, 0.1 });
        }) == ErrorCode::BadBackground);
}

TEST_CASE("density_at")
{
  const auto m = fixture::two_disks();
  CHECK(density_at(m, std::vector{ 0.0, 0.0 }) == doctest::Approx(2.0 / std::numbers::pi));
  CHECK(density_at(m, std::vector{ 10.0, 10.0 }) == 0.0);
  CHECK_THROWS_AS(density_at(m, std::vector{ 0.0 }), Error);

  const auto b = fixture::two_disks_background(0.3, 0.1);
  const double bg = 0.1 / 18.0;
  CHECK(density_at(b, std::vector{ 1.5, 0.0 }) == doctest::Approx(bg));
  CHECK(density_at(b, std::vector{ 0.0, 0.0 }) ==
        doctest::Approx(0.45 / (std::numbers::pi * 0.09) + bg));
}

TEST_CASE("density integrates to one (quasi-random quadrature)")
{
  const auto m = fixture::two_disks_background(0.3, 0.1);
  // Bounding box [-1.5, 4.5] x [-1.5, 1.5], Halton points in bases 2 and 3.
  const std::size_t N = 1'000'000;
  double sum = 0.0;
  std::vector<double> x(2);
  for (std::size_t i = 1; i <= N; ++i) {
    x[0] = -1.5 + 6.0 * halton(i, 2);
    x[1] = -1.5 + 3.0 * halton(i, 3);
    sum += density_at(m, x);
  }
  CHECK(sum / N * 18.0 == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("sample")
{
  const auto m = fixture::two_disks();
  const auto c = sample(m, 100000, 7);
  std::size_t right = 0;
  for (std::size_t i = 0; i < c.size(); ++i)
    right += c[i][0] > 1.5 ? 1 : 0;
  CHECK(std::abs(right / 1e5 - 0.5) <= 0.01);

  const auto one = sample(m, 1, 3);
  REQUIRE(one.size() == 1);
  CHECK(density_at(m, one[0]) > 0.0);

  CHECK(sample(m, 500, 42).coords() == sample(m, 500, 42).coords());
  CHECK(sample(m, 500, 42).coords() != sample(m, 500, 43).coords());
  CHECK_THROWS_AS(sample(m, 0, 1), Error);
}

TEST_CASE("sampling consistency over analytic regions")
{
  // Region masses: half-plane x < 0 inside disk 1 (0.25); box interior
  // outside disks; ring 0.25 < |x| < 0.5 of disk 1 (0.5 * 0.75).
  const auto m = fixture::two_disks_background(0.5, 0.2);
  const double disk = 0.4;
  const double bg_density = 0.2 / 18.0;
  const double ring = disk * 0.75;
  const double left_half = disk * 0.5;
  const double outside = 0.2 - 2 * bg_density * std::numbers::pi * 0.25;
  const std::size_t n = 100000;
  for (std::uint64_t seed : { 1u, 2u, 3u, 4u, 5u }) {
    const auto c = sample(m, n, seed);
    std::size_t a = 0, b = 0, o = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = std::hypot(c[i][0], c[i][1]);
      const double r2 = std::hypot(c[i][0] - 3.0, c[i][1]);
      a += (r > 0.25 && r < 0.5) ? 1 : 0;
      b += (r < 0.5 && c[i][0] < 0) ? 1 : 0;
      o += (r >= 0.5 && r2 >= 0.5) ? 1 : 0;
    }
    // The ring also receives background mass in that annulus.
    const double qa = ring + bg_density * std::numbers::pi * (0.25 - 0.0625);
    const double qb = left_half + bg_density * std::numbers::pi * 0.125;
    for (auto [count, q] : { std::pair{ a, qa }, std::pair{ b, qb }, std::pair{ o, outside } })
      CHECK(std::abs(count / double(n) - q) <= 4 * std::sqrt(q * (1 - q) / n));
  }
}

TEST_CASE("ground_truth")
{
  const auto m = fixture::two_disks();
  const auto c = sample(m, 2000, 11);
  const auto g = ground_truth(m, c, 0.5);
  CHECK(g.m == 2);
  CHECK(g.labels.size() == c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK((g.labels[i] == 1 || g.labels[i] == 2));
    CHECK(g.labels[i] == (c[i][0] > 1.5 ? 2 : 1));
  }
  const auto high = ground_truth(m, c, 0.7);
  CHECK(high.m == 0);
  CHECK(std::all_of(high.labels.begin(), high.labels.end(), [](int l) { return l == 0; }));

  const auto b = fixture::two_disks_background(0.3, 0.1);
  const auto cb = sample(b, 3000, 2);
  const auto gb = ground_truth(b, cb, 0.5);
  CHECK(gb.m == 2);
  for (std::size_t i = 0; i < cb.size(); ++i) {
    const double p = density_at(b, cb[i]);
    if (gb.labels[i] >= 1)
      CHECK(p >= 0.5);
    else
      CHECK(p < 0.5);
  }
}

TEST_CASE("geometry_quantities for two disks")
{
  const auto g = geometry_quantities(fixture::two_disks(), 0.5);
  CHECK(g.eta_d == doctest::Approx(std::numbers::pi));
  CHECK(g.eps_tilde == doctest::Approx(0.025));
  REQUIRE(g.clusters.size() == 2);
  for (const auto& c : g.clusters) {
    CHECK(c.u == doctest::Approx(2.0));
    CHECK(c.rho == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(c.beta == doctest::Approx(0.5));
    CHECK(c.beta_tilde >= c.beta);
    CHECK(c.rho <= c.beta_tilde + 1e-15);
    CHECK(c.p_max == doctest::Approx(fixture::two_disk_density));
    CHECK(c.nu_max == doctest::Approx(0.5));
    CHECK(c.kappa == doctest::Approx(0.5));
  }
  CHECK_THROWS_AS(geometry_quantities(make_ball_mixture(2, { { { 0, 0 }, 1, 1.0 } }), 0.1), Error);
}

TEST_CASE("ball intersection volume against closed forms")
{
  for (double d : { 0.6, 0.7, 1.0, 1.3 }) {
    CHECK(ball_intersection_volume(2, 1.0, 0.5, d) == doctest::Approx(circle_lens(1.0, 0.5, d)).epsilon(1e-10));
    CHECK(ball_intersection_volume(3, 1.0, 0.5, d) == doctest::Approx(sphere_lens(1.0, 0.5, d)).epsilon(1e-10));
  }
  CHECK(ball_intersection_volume(2, 1.0, 0.5, 2.0) == 0.0);
  CHECK(ball_intersection_volume(2, 1.0, 0.5, 0.2) == doctest::Approx(std::numbers::pi * 0.25));
  CHECK(ball_intersection_volume(2, 1.0, 3.0, 0.5) == doctest::Approx(std::numbers::pi));
}

TEST_CASE("rho matches a Monte Carlo infimum within 2%")
{
  auto check = [](const DensityModel& m, double t) {
    const auto g = geometry_quantities(m, t);
    const auto& c0 = g.clusters[0];
    const auto& ball = m.components()[c0.component];
    const auto cloud = sample(m, 400000, 99);
    // 1000 probes on the half of the boundary facing away from cluster 2.
    double worst = 1.0;
    for (int p = 0; p < 1000; ++p) {
      const double a = std::numbers::pi * (0.5 + p / 1000.0);
      const double x = ball.center[0] + ball.radius * std::cos(a);
      const double y = ball.center[1] + ball.radius * std::sin(a);
      std::size_t hit = 0;
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double dx = cloud[i][0] - x, dy = cloud[i][1] - y;
        hit += (dx * dx + dy * dy <= c0.u * c0.u) ? 1 : 0;
      }
      worst = std::min(worst, hit / double(cloud.size()));
    }
    CHECK(worst == doctest::Approx(c0.rho).epsilon(0.02));
  };
  check(fixture::two_disks(), 0.5);
  // Narrow gap: rho is a lens fraction of the disk mass.
  check(make_ball_mixture(2, { { { 0, 0 }, 1.0, 0.5 }, { { 2.5, 0 }, 1.0, 0.5 } }), 0.1);
}

TEST_CASE("boundary strip")
{
  const auto b = fixture::two_disks_background(0.3, 0.1);
  // t - 2 eps above the background density: no strip.
  CHECK(boundary_strip_mass(b, 0.5, 0.1) == 0.0);
  CHECK_FALSE(in_boundary_strip(b, 0.5, 0.1, std::vector{ 1.5, 0.0 }));
  // t - 2 eps below it: the whole box outside the disks.
  CHECK(boundary_strip_mass(b, 0.5, 0.3) ==
        doctest::Approx(0.1 - 2 * (0.1 / 18.0) * std::numbers::pi * 0.09));
  CHECK(in_boundary_strip(b, 0.5, 0.3, std::vector{ 1.5, 0.0 }));
  CHECK_FALSE(in_boundary_strip(b, 0.5, 0.3, std::vector{ 0.0, 0.0 }));
  CHECK_FALSE(in_boundary_strip(b, 0.5, 0.3, std::vector{ 9.0, 0.0 }));

  // Background density times total active perimeter.
  CHECK(boundary_mass_constant(b, 0.5) ==
        doctest::Approx(0.1 / 18.0 * 2 * 2 * std::numbers::pi * 0.3));
}

TEST_CASE("point cloud permutation")
{
  const auto c = sample(fixture::two_disks(), 5, 1);
  const std::vector<std::size_t> perm{ 4, 3, 2, 1, 0 };
  const auto p = c.permuted(perm);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(p[i][0] == c[4 - i][0]);
}
