#include "knnclust/theory.hpp"

#include "knnclust/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace knnclust {

namespace {

double pow4(int e)
{
  return std::ldexp(1.0, 2 * e);
}

// x log(x / p) with the 0 log 0 = 0 convention.
double xlogx_over(double x, double p)
{
  return x == 0.0 ? 0.0 : x * std::log(x / p);
}

} // namespace

double gamma_coefficient(double rho, double t, double p_max, int d)
{
  if (!(rho > 0.0 && rho <= 1.0))
    throw Error(ErrorCode::DomainError, "rho must lie in (0, 1]");
  if (!(t > 0.0 && t <= p_max))
    throw Error(ErrorCode::DomainError, "need 0 < t <= p_max");
  if (d < 1)
    throw Error(ErrorCode::DomainError, "dimension must be positive");
  return rho / (2.0 + (t / p_max) / pow4(d));
}

OptimalK optimal_k(std::size_t n, double gamma)
{
  if (n < 2)
    throw Error(ErrorCode::DomainError, "optimal k needs n >= 2");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw Error(ErrorCode::DomainError, "gamma must lie in (0, 1)");
  OptimalK out;
  out.real = static_cast<double>(n - 1) * gamma + 1.0;
  const double rounded = std::round(out.real);
  const double hi = static_cast<double>(n - 1);
  if (rounded > hi) {
    out.k = n - 1;
    out.clamped = true;
  } else if (rounded < 1.0) {
    out.k = 1;
    out.clamped = true;
  } else {
    out.k = static_cast<std::size_t>(rounded);
  }
  return out;
}

RateBound omega_rates(const TheoryInputs& inputs,
                      Scenario which,
                      Scope scope,
                      Flavor flavor,
                      std::size_t cluster)
{
  const auto& g = inputs.geometry;
  if (g.clusters.empty())
    throw Error(ErrorCode::DomainError, "no clusters in geometry");
  if (cluster >= g.clusters.size())
    throw Error(ErrorCode::DomainError, "cluster index out of range");
  if (flavor == Flavor::Epsilon)
    throw Error(ErrorCode::DomainError, "rates are stated for kNN graphs only");
  if (inputs.n < 2)
    throw Error(ErrorCode::DomainError, "rates need n >= 2");

  const auto& c = g.clusters[cluster];
  const bool worst_rho = flavor == Flavor::Symmetric || scope == Scope::AllClusters;
  const double rho = worst_rho ? g.rho_min() : c.rho;
  const double p_max = scope == Scope::AllClusters ? g.p_max() : c.p_max;
  const double t = g.t;
  const int d = g.d;
  const double m = static_cast<double>(g.clusters.size());
  const double n = static_cast<double>(inputs.n);

  RateBound out;
  out.gamma = gamma_coefficient(rho, t, p_max, d);
  out.k = optimal_k(inputs.n, out.gamma);
  out.omega = rho / (2.0 * pow4(d + 1) * p_max / t + 4.0);

  if (which == Scenario::Noisy) {
    if (!(inputs.delta > 0.0) || !(inputs.eps > 0.0) || !(inputs.h > 0.0) || !(inputs.c2 > 0.0))
      throw Error(ErrorCode::DomainError, "noisy rates need positive delta, eps, h and C2");
    const double scale = n / (n - 1.0);
    out.omega = std::min({ out.omega,
                           scale * inputs.delta / 8.0,
                           scale * inputs.c2 * std::pow(inputs.h, d) * inputs.eps * inputs.eps });
  }

  const bool noisy = which == Scenario::Noisy;
  if (scope == Scope::OneCluster)
    out.prefactor = flavor == Flavor::Mutual ? (noisy ? 8.0 : 3.0) : (noisy ? m + 7.0 : m + 2.0);
  else
    out.prefactor = flavor == Flavor::Mutual ? (noisy ? 3.0 * m + 5.0 : 3.0 * m)
                                             : m * (noisy ? m + 7.0 : m + 2.0);
  out.exponent = -(n - 1.0) * out.omega;
  out.bound = out.prefactor * std::exp(out.exponent);
  return out;
}

std::vector<CurvePoint> bound_curve(const TheoryInputs& inputs,
                                    Scenario which,
                                    Scope scope,
                                    Flavor flavor,
                                    std::size_t cluster,
                                    std::span<const std::size_t> ns)
{
  std::vector<CurvePoint> curve;
  curve.reserve(ns.size());
  TheoryInputs at = inputs;
  for (std::size_t n : ns) {
    at.n = n;
    curve.push_back({ n, omega_rates(at, which, scope, flavor, cluster) });
  }
  return curve;
}

KWindow condition1_window(const TheoryInputs& inputs, std::size_t cluster, Flavor flavor)
{
  const auto& g = inputs.geometry;
  if (cluster >= g.clusters.size())
    throw Error(ErrorCode::DegenerateGeometry, "cluster index out of range");
  if (inputs.n < 2)
    throw Error(ErrorCode::DomainError, "window needs n >= 2");
  const auto& c = g.clusters[cluster];
  if (!(c.u > 0.0) || !(c.volume > 0.0) || !(c.rho > 0.0))
    throw Error(ErrorCode::DegenerateGeometry, "cluster geometry is degenerate");
  const int d = g.d;
  const double n = static_cast<double>(inputs.n);
  const double ratio = c.p_max / g.t;

  KWindow w;
  w.k_low_real =
    pow4(d + 1) * ratio * std::log(2.0 * c.p_max * c.volume * std::pow(8.0, d) * n);
  w.connectivity_upper =
    (n - 1.0) * 2.0 * pow4(d) * g.eta_d * c.p_max * std::pow(std::min(c.u, c.nu_max), d);
  if (flavor == Flavor::Symmetric)
    w.isolation_upper = (n - 1.0) * g.rho_min() / 2.0 - 2.0 * std::log(n);
  else
    w.isolation_upper = c.rho * n / 2.0 - 2.0 * std::log(c.beta_tilde * n);

  w.k_low = static_cast<long long>(std::ceil(w.k_low_real));
  // Connectivity bound is inclusive, isolation bound strict.
  const auto conn = static_cast<long long>(std::floor(w.connectivity_upper));
  const auto iso = static_cast<long long>(std::ceil(w.isolation_upper)) - 1;
  w.k_high = std::min(conn, iso);
  w.feasible = w.k_low <= w.k_high;
  return w;
}

double kl_divergence(double alpha, double p)
{
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw Error(ErrorCode::DomainError, "alpha must lie in [0, 1]");
  if (!(p > 0.0 && p < 1.0))
    throw Error(ErrorCode::DomainError, "p must lie in (0, 1)");
  return xlogx_over(alpha, p) + xlogx_over(1.0 - alpha, 1.0 - p);
}

TailBound hoeffding_tail(std::size_t n, double p, std::size_t k, Tail side)
{
  if (n < 1)
    throw Error(ErrorCode::DomainError, "tail bound needs n >= 1");
  if (k > n)
    throw Error(ErrorCode::DomainError, "k exceeds n");
  const double alpha = static_cast<double>(k) / static_cast<double>(n);
  if (side == Tail::Upper && alpha < p)
    throw Error(ErrorCode::SideMismatch, "upper tail needs k/n >= p");
  if (side == Tail::Lower && alpha > p)
    throw Error(ErrorCode::SideMismatch, "lower tail needs k/n <= p");
  TailBound out;
  out.exponent = -static_cast<double>(n) * kl_divergence(alpha, p);
  out.bound = std::exp(out.exponent);
  return out;
}

MaxRadiusBound max_radius_bound(std::size_t n,
                                std::size_t k,
                                double rho,
                                double beta_tilde,
                                bool strict)
{
  if (n < 2 || k < 1)
    throw Error(ErrorCode::DomainError, "need n >= 2 and k >= 1");
  if (!(rho > 0.0 && rho <= 1.0) || !(beta_tilde > 0.0 && beta_tilde <= 1.0))
    throw Error(ErrorCode::DomainError, "rho and beta_tilde must lie in (0, 1]");
  const double nn = static_cast<double>(n);
  MaxRadiusBound out;
  out.k_limit = rho * nn / 2.0 - 2.0 * std::log(beta_tilde * nn);
  out.precondition_holds = static_cast<double>(k) < out.k_limit;
  if (strict && !out.precondition_holds)
    throw Error(ErrorCode::PreconditionFailed,
                "k=" + std::to_string(k) + " is not below rho n / 2 - 2 log(beta_tilde n) = " +
                  std::to_string(out.k_limit));
  out.exponent =
    -((nn - 1.0) / 2.0) * (rho / 2.0 - static_cast<double>(k - 1) / (nn - 1.0));
  out.bound = std::exp(out.exponent);
  return out;
}

double connectivity_bound(std::size_t k, double t, double p_max, int d)
{
  return 2.0 * std::exp(-static_cast<double>(k - 1) / pow4(d + 1) * t / p_max);
}

double cluster_size_bound(std::size_t n, double beta, double delta)
{
  const double r = (beta - delta) / beta;
  return std::exp(-0.5 * static_cast<double>(n) * beta * r * r);
}

double boundary_size_bound(std::size_t n, double delta)
{
  return std::exp(-delta * static_cast<double>(n) / 8.0);
}

double ratio_threshold(double d_bar, double beta, double eps_n)
{
  return 4.0 * d_bar * eps_n / beta;
}

} // namespace knnclust
