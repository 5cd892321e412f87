#pragma once

#include "knnclust/graph.hpp"
#include "knnclust/model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace knnclust {

enum class Scenario
{
  NoiseFree,
  Noisy
};

enum class Scope
{
  OneCluster,
  AllClusters
};

/// Gamma = rho / (2 + 4^-d * t / p_max). Pass rho_min and the global p_max
/// for the all-clusters coefficient.
double gamma_coefficient(double rho, double t, double p_max, int d);

struct OptimalK
{
  double real = 0.0;
  std::size_t k = 1;
  //! The rounded value fell outside [1, n-1] and was clamped.
  bool clamped = false;
};

//! k = (n - 1) Gamma + 1, also rounded to the nearest admissible integer.
OptimalK optimal_k(std::size_t n, double gamma);

struct TheoryInputs
{
  GeometryQuantities geometry;
  std::size_t n = 0;
  double delta = 0.0;
  double eps = 0.0;
  double h = 0.0;
  //! Kernel density concentration constant; not derivable, treated as a fit parameter.
  double c2 = 1.0;
};

struct RateBound
{
  double gamma = 0.0;
  OptimalK k;
  double omega = 0.0;
  double prefactor = 0.0;
  //! -(n - 1) * omega
  double exponent = 0.0;
  //! prefactor * exp(exponent), the failure-probability upper bound.
  double bound = 0.0;
};

/// Rate Omega, optimal k and failure bound for one cluster (index into
/// geometry.clusters) or all clusters. The symmetric graph replaces rho by
/// rho_min; all-clusters scope also uses the global p_max. Prefactors:
///   mutual/one: 3 (noise-free), 8 (noisy)
///   symmetric/one: m + 2, m + 7
///   mutual/all: 3m, 3m + 5
///   symmetric/all: m (m + 2), m (m + 7)  (union bound over clusters)
RateBound omega_rates(const TheoryInputs& inputs,
                      Scenario which,
                      Scope scope,
                      Flavor flavor,
                      std::size_t cluster = 0);

struct CurvePoint
{
  std::size_t n = 0;
  RateBound rate;
};

std::vector<CurvePoint> bound_curve(const TheoryInputs& inputs,
                                    Scenario which,
                                    Scope scope,
                                    Flavor flavor,
                                    std::size_t cluster,
                                    std::span<const std::size_t> ns);

/// Admissible k range for one cluster.
///
/// Both ends are reconstructions from the within-cluster connectivity
/// argument (theta = 1 / (2 p_max), covering radius z <= 4 min{u, nu_max}):
///   k_low  = 4^(d+1) (p_max / t) log(2 p_max vol(C) 8^d n)
///   k_high = min{(n - 1) 2 4^d eta_d p_max min{u, nu_max}^d, isolation}
/// with isolation = rho n / 2 - 2 log(beta_tilde n) for the mutual graph and
/// (n - 1) rho_min / 2 - 2 log n for the symmetric graph.
struct KWindow
{
  double k_low_real = 0.0;
  double connectivity_upper = 0.0;
  double isolation_upper = 0.0;
  long long k_low = 0;
  long long k_high = 0;
  bool feasible = false;
};

KWindow condition1_window(const TheoryInputs& inputs,
                          std::size_t cluster = 0,
                          Flavor flavor = Flavor::Mutual);

//! K(alpha || p) between Bernoulli(alpha) and Bernoulli(p).
double kl_divergence(double alpha, double p);

enum class Tail
{
  Upper,
  Lower
};

struct TailBound
{
  double exponent = 0.0;
  double bound = 0.0;
};

//! exp(-n K(k/n || p)) bounding P(M >= k) (upper) or P(M <= k) (lower).
TailBound hoeffding_tail(std::size_t n, double p, std::size_t k, Tail side);

struct MaxRadiusBound
{
  double exponent = 0.0;
  double bound = 0.0;
  //! k < rho n / 2 - 2 log(beta_tilde n)
  bool precondition_holds = false;
  double k_limit = 0.0;
};

/// exp(-((n-1)/2) (rho/2 - (k-1)/(n-1))) bounding P(R_max >= u). With
/// strict set, a violated precondition raises PreconditionFailed instead of
/// being reported in the result.
MaxRadiusBound max_radius_bound(std::size_t n,
                                std::size_t k,
                                double rho,
                                double beta_tilde,
                                bool strict = false);

//! 2 exp(-(k-1) t / (4^(d+1) p_max)), within-cluster disconnection.
double connectivity_bound(std::size_t k, double t, double p_max, int d);

//! exp(-n beta ((beta - delta)/beta)^2 / 2), too few cluster samples.
double cluster_size_bound(std::size_t n, double beta, double delta);

//! exp(-delta n / 8), too many boundary-strip samples.
double boundary_size_bound(std::size_t n, double delta);

//! Background-to-cluster ratio threshold 4 D_bar eps_n / beta.
double ratio_threshold(double d_bar, double beta, double eps_n);

} // namespace knnclust
