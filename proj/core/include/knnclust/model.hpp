#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace knnclust {

//! Volume of the d-dimensional unit ball, pi^(d/2) / Gamma(d/2 + 1).
double unit_ball_volume(int d);

struct Ball
{
  std::vector<double> center;
  double radius = 0.0;
  double mass = 0.0;
};

struct Box
{
  std::vector<double> lower;
  std::vector<double> upper;

  double volume() const;
  bool contains(std::span<const double> x) const;
};

struct Background
{
  Box region;
  double mass = 0.0;
};

/// Mixture of uniform distributions on pairwise disjoint balls plus an
/// optional uniform box background. Every ball lies either entirely inside
/// the background box or entirely outside it, so all level sets and cluster
/// constants have closed forms.
class DensityModel
{
public:
  //! Empty placeholder; valid models come from make_ball_mixture.
  DensityModel() = default;

  int dimension() const { return dim_; }
  const std::vector<Ball>& components() const { return components_; }
  const std::optional<Background>& background() const { return background_; }

  //! Density contributed by component i alone: mass_i / (eta_d r_i^d).
  double component_density(std::size_t i) const;
  //! Background density inside the box (0 without background).
  double background_density() const;
  //! Total density on ball i, background included when the box encloses it.
  double ball_density(std::size_t i) const;
  bool ball_in_background(std::size_t i) const { return enclosed_[i]; }
  double ball_volume(std::size_t i) const;

  //! Short provenance tag derived from all model parameters.
  const std::string& id() const { return id_; }

private:
  friend DensityModel make_ball_mixture(int,
                                        std::vector<Ball>,
                                        std::optional<Background>);

  int dim_ = 0;
  std::vector<Ball> components_;
  std::optional<Background> background_;
  std::vector<bool> enclosed_;
  std::string id_;
};

DensityModel make_ball_mixture(int d,
                               std::vector<Ball> components,
                               std::optional<Background> background = {});

double density_at(const DensityModel& model, std::span<const double> x);

//! n x d sample with row-major storage.
class PointCloud
{
public:
  PointCloud(std::size_t dim,
             std::vector<double> coords,
             std::uint64_t seed = 0,
             std::string model_id = {});

  std::size_t size() const { return n_; }
  std::size_t dimension() const { return dim_; }
  std::span<const double> operator[](std::size_t i) const
  {
    return { coords_.data() + i * dim_, dim_ };
  }
  const std::vector<double>& coords() const { return coords_; }
  std::uint64_t seed() const { return seed_; }
  const std::string& model_id() const { return model_id_; }

  //! Cloud with points reordered as perm[0], perm[1], ...
  PointCloud permuted(std::span<const std::size_t> perm) const;

private:
  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::uint64_t seed_ = 0;
  std::string model_id_;
};

PointCloud sample(const DensityModel& model, std::size_t n, std::uint64_t seed);

struct GroundTruth
{
  double level = 0.0;
  //! 0 = background, i >= 1 = cluster i.
  std::vector<int> labels;
  int m = 0;
  //! cluster_component[i - 1] is the model component forming cluster i.
  std::vector<std::size_t> cluster_component;
};

//! Indices of components whose density reaches t, in component order.
std::vector<std::size_t> active_components(const DensityModel& model, double t);

GroundTruth ground_truth(const DensityModel& model,
                         const PointCloud& cloud,
                         double t);

struct ClusterGeometry
{
  std::size_t component = 0;
  double beta = 0.0;
  double beta_tilde = 0.0;
  double u = 0.0;
  double rho = 0.0;
  double p_max = 0.0;
  double nu_max = 0.0;
  double kappa = 0.0;
  double volume = 0.0;
  //! Overlap constant O(u): inf_x vol(B(x,u) cap C_-) / vol(B(x,u)).
  double overlap = 0.0;
};

struct GeometryQuantities
{
  double t = 0.0;
  double eta_d = 0.0;
  double eps_tilde = 0.0;
  int d = 0;
  std::vector<ClusterGeometry> clusters;

  double rho_min() const;
  double p_max() const;
  double beta_tilde_max() const;
};

/// Closed-form cluster constants for a ball mixture at level t.
///
/// The enlarged cluster C_-(2 eps_tilde) coincides with the ball because
/// the density jumps from the ball value straight to the background value,
/// which lies below t - 2 eps_tilde. Hence beta_tilde = beta. rho is the
/// mass the enlarged cluster places in B(x, u) minimised over the ball: a
/// boundary point sees the smallest lens B(c, r) cap B(x, u).
GeometryQuantities geometry_quantities(const DensityModel& model,
                                       double t,
                                       std::optional<double> eps_tilde = {});

//! Volume of B(0, r) cap B(y, u) for |y| = dist.
double ball_intersection_volume(int d, double r, double u, double dist);

/// True if x lies in the union of C_-(2 eps) \ C over the clusters at
/// level t, i.e. in the boundary strip of the level-set construction.
bool in_boundary_strip(const DensityModel& model,
                       double t,
                       double eps,
                       std::span<const double> x);

//! Probability mass of the boundary strip.
double boundary_strip_mass(const DensityModel& model, double t, double eps);

//! Background density times total cluster surface area at level t.
double boundary_mass_constant(const DensityModel& model, double t);

//! Distance from x to the nearest boundary of any ball or of the box.
double distance_to_support_boundary(const DensityModel& model,
                                    std::span<const double> x);

} // namespace knnclust
