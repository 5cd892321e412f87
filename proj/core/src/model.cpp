#include "knnclust/model.hpp"

#include "knnclust/error.hpp"
#include "knnclust/rng.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <bit>
#include <limits>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

namespace knnclust {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b)
{
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

double distance_to_box(const Box& box, std::span<const double> x)
{
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    double gap = 0.0;
    if (x[j] < box.lower[j])
      gap = box.lower[j] - x[j];
    else if (x[j] > box.upper[j])
      gap = x[j] - box.upper[j];
    s += gap * gap;
  }
  return std::sqrt(s);
}

bool ball_inside_box(const Ball& b, const Box& box)
{
  for (std::size_t j = 0; j < b.center.size(); ++j) {
    if (b.center[j] - b.radius < box.lower[j] ||
        b.center[j] + b.radius > box.upper[j])
      return false;
  }
  return true;
}

std::string make_id(int d,
                    const std::vector<Ball>& components,
                    const std::optional<Background>& background)
{
  std::uint64_t h = mix64(static_cast<std::uint64_t>(d));
  auto feed = [&h](double v) { h = hash_combine(h, std::bit_cast<std::uint64_t>(v)); };
  for (const auto& c : components) {
    for (double v : c.center)
      feed(v);
    feed(c.radius);
    feed(c.mass);
  }
  if (background) {
    for (double v : background->region.lower)
      feed(v);
    for (double v : background->region.upper)
      feed(v);
    feed(background->mass);
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "ballmix-%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

// Volume of the cap of height h (0 <= h <= 2R) cut from a d-ball of radius R.
double cap_volume(int d, double radius, double height)
{
  const double full = unit_ball_volume(d) * std::pow(radius, d);
  if (height <= 0.0)
    return 0.0;
  if (height >= 2.0 * radius)
    return full;
  if (height > radius)
    return full - cap_volume(d, radius, 2.0 * radius - height);
  const double x = (2.0 * radius * height - height * height) / (radius * radius);
  return 0.5 * full * boost::math::ibeta(0.5 * (d + 1), 0.5, std::min(x, 1.0));
}

} // namespace

double unit_ball_volume(int d)
{
  if (d < 1)
    throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
  const double half = 0.5 * d;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

double Box::volume() const
{
  double v = 1.0;
  for (std::size_t j = 0; j < lower.size(); ++j)
    v *= upper[j] - lower[j];
  return v;
}

bool Box::contains(std::span<const double> x) const
{
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j] < lower[j] || x[j] > upper[j])
      return false;
  return true;
}

double DensityModel::component_density(std::size_t i) const
{
  return components_[i].mass / ball_volume(i);
}

double DensityModel::background_density() const
{
  return background_ ? background_->mass / background_->region.volume() : 0.0;
}

double DensityModel::ball_density(std::size_t i) const
{
  return component_density(i) + (enclosed_[i] ? background_density() : 0.0);
}

double DensityModel::ball_volume(std::size_t i) const
{
  return unit_ball_volume(dim_) * std::pow(components_[i].radius, dim_);
}

DensityModel make_ball_mixture(int d,
                               std::vector<Ball> components,
                               std::optional<Background> background)
{
  if (d < 1)
    throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
  if (components.empty())
    throw Error(ErrorCode::InvalidArgument, "at least one component required");
  const auto dim = static_cast<std::size_t>(d);

  double total = 0.0;
  for (const auto& c : components) {
    if (c.center.size() != dim)
      throw Error(ErrorCode::DimensionMismatch, "component center has wrong dimension");
    if (!(c.radius > 0.0) || !std::isfinite(c.radius))
      throw Error(ErrorCode::InvalidArgument, "component radius must be positive");
    if (!(c.mass > 0.0))
      throw Error(ErrorCode::BadMass, "component mass must be positive");
    total += c.mass;
  }
  for (std::size_t i = 0; i < components.size(); ++i) {
    for (std::size_t j = i + 1; j < components.size(); ++j) {
      const double dist =
        std::sqrt(squared_distance(components[i].center, components[j].center));
      if (!(dist > components[i].radius + components[j].radius))
        throw Error(ErrorCode::OverlappingComponents,
                    "components " + std::to_string(i) + " and " +
                      std::to_string(j) + " intersect");
    }
  }

  std::vector<bool> enclosed(components.size(), false);
  if (background) {
    const Box& box = background->region;
    if (box.lower.size() != dim || box.upper.size() != dim)
      throw Error(ErrorCode::DimensionMismatch, "background box has wrong dimension");
    for (std::size_t j = 0; j < dim; ++j)
      if (!(box.upper[j] > box.lower[j]))
        throw Error(ErrorCode::BadBackground, "background box is empty");
    if (!(background->mass > 0.0))
      throw Error(ErrorCode::BadMass, "background mass must be positive");
    total += background->mass;
    for (std::size_t i = 0; i < components.size(); ++i) {
      if (ball_inside_box(components[i], box))
        enclosed[i] = true;
      else if (distance_to_box(box, components[i].center) < components[i].radius)
        throw Error(ErrorCode::BadBackground,
                    "component " + std::to_string(i) +
                      " straddles the background box boundary");
    }
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw Error(ErrorCode::BadMass, "masses sum to " + std::to_string(total));

  DensityModel model;
  model.dim_ = d;
  model.id_ = make_id(d, components, background);
  model.components_ = std::move(components);
  model.background_ = std::move(background);
  model.enclosed_ = std::move(enclosed);
  return model;
}

double density_at(const DensityModel& model, std::span<const double> x)
{
  if (x.size() != static_cast<std::size_t>(model.dimension()))
    throw Error(ErrorCode::DimensionMismatch, "point has wrong dimension");
  double p = 0.0;
  const auto& comps = model.components();
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const double r = comps[i].radius;
    if (squared_distance(x, comps[i].center) <= r * r)
      p += model.component_density(i);
  }
  if (model.background() && model.background()->region.contains(x))
    p += model.background_density();
  return p;
}

PointCloud::PointCloud(std::size_t dim,
                       std::vector<double> coords,
                       std::uint64_t seed,
                       std::string model_id)
  : dim_(dim)
  , coords_(std::move(coords))
  , seed_(seed)
  , model_id_(std::move(model_id))
{
  if (dim_ == 0)
    throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
  if (coords_.empty() || coords_.size() % dim_ != 0)
    throw Error(ErrorCode::DimensionMismatch,
                "coordinate count is not a positive multiple of the dimension");
  for (double v : coords_)
    if (!std::isfinite(v))
      throw Error(ErrorCode::InvalidArgument, "non-finite coordinate");
  n_ = coords_.size() / dim_;
}

PointCloud PointCloud::permuted(std::span<const std::size_t> perm) const
{
  if (perm.size() != n_)
    throw Error(ErrorCode::MismatchedInputs, "permutation length differs from n");
  std::vector<double> out;
  out.reserve(coords_.size());
  for (std::size_t i : perm) {
    auto p = (*this)[i];
    out.insert(out.end(), p.begin(), p.end());
  }
  return PointCloud(dim_, std::move(out), seed_, model_id_);
}

PointCloud sample(const DensityModel& model, std::size_t n, std::uint64_t seed)
{
  if (n < 1)
    throw Error(ErrorCode::InvalidArgument, "sample size must be at least 1");
  const auto d = static_cast<std::size_t>(model.dimension());
  const auto& comps = model.components();

  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& c : comps)
    cumulative.push_back(acc += c.mass);

  CounterRng rng(seed);
  std::vector<double> coords(n * d);
  std::vector<double> direction(d);
  for (std::size_t s = 0; s < n; ++s) {
    double* out = coords.data() + s * d;
    const double u = rng.uniform() * (model.background() ? 1.0 : acc);
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) {
      const Box& box = model.background()->region;
      for (std::size_t j = 0; j < d; ++j)
        out[j] = box.lower[j] + rng.uniform() * (box.upper[j] - box.lower[j]);
      continue;
    }
    const Ball& ball = comps[static_cast<std::size_t>(it - cumulative.begin())];
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (auto& v : direction) {
        v = rng.normal();
        norm2 += v * v;
      }
    } while (norm2 == 0.0);
    const double scale = ball.radius *
                         std::pow(rng.uniform_open_low(), 1.0 / static_cast<double>(d)) /
                         std::sqrt(norm2);
    for (std::size_t j = 0; j < d; ++j)
      out[j] = ball.center[j] + scale * direction[j];
  }
  return PointCloud(d, std::move(coords), seed, model.id());
}

std::vector<std::size_t> active_components(const DensityModel& model, double t)
{
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < model.components().size(); ++i)
    if (model.ball_density(i) >= t)
      active.push_back(i);
  return active;
}

GroundTruth ground_truth(const DensityModel& model,
                         const PointCloud& cloud,
                         double t)
{
  if (!(t > 0.0))
    throw Error(ErrorCode::InvalidArgument, "level t must be positive");
  if (t <= model.background_density())
    throw Error(ErrorCode::InvalidArgument,
                "level t must exceed the background density");
  if (cloud.dimension() != static_cast<std::size_t>(model.dimension()))
    throw Error(ErrorCode::DimensionMismatch, "cloud and model dimensions differ");

  GroundTruth truth;
  truth.level = t;
  truth.cluster_component = active_components(model, t);
  truth.m = static_cast<int>(truth.cluster_component.size());
  truth.labels.assign(cloud.size(), 0);
  const auto& comps = model.components();
  for (std::size_t s = 0; s < cloud.size(); ++s) {
    for (std::size_t c = 0; c < truth.cluster_component.size(); ++c) {
      const Ball& ball = comps[truth.cluster_component[c]];
      if (squared_distance(cloud[s], ball.center) <= ball.radius * ball.radius) {
        truth.labels[s] = static_cast<int>(c) + 1;
        break;
      }
    }
  }
  return truth;
}

double GeometryQuantities::rho_min() const
{
  double v = clusters.front().rho;
  for (const auto& c : clusters)
    v = std::min(v, c.rho);
  return v;
}

double GeometryQuantities::p_max() const
{
  double v = 0.0;
  for (const auto& c : clusters)
    v = std::max(v, c.p_max);
  return v;
}

double GeometryQuantities::beta_tilde_max() const
{
  double v = 0.0;
  for (const auto& c : clusters)
    v = std::max(v, c.beta_tilde);
  return v;
}

double ball_intersection_volume(int d, double r, double u, double dist)
{
  if (dist >= r + u)
    return 0.0;
  const double eta = unit_ball_volume(d);
  if (dist + std::min(r, u) <= std::max(r, u))
    return eta * std::pow(std::min(r, u), d);
  // Radical hyperplane at distance x from the first center.
  const double x = (dist * dist + r * r - u * u) / (2.0 * dist);
  return cap_volume(d, r, r - x) + cap_volume(d, u, u - (dist - x));
}

GeometryQuantities geometry_quantities(const DensityModel& model,
                                       double t,
                                       std::optional<double> eps_tilde)
{
  const double eps = eps_tilde.value_or(0.05 * t);
  if (!(eps >= 0.0))
    throw Error(ErrorCode::DomainError, "eps_tilde must be nonnegative");
  if (!(t - 2.0 * eps > model.background_density()))
    throw Error(ErrorCode::DomainError,
                "t - 2 eps_tilde must exceed the background density");

  const int d = model.dimension();
  GeometryQuantities g;
  g.t = t;
  g.d = d;
  g.eps_tilde = eps;
  g.eta_d = unit_ball_volume(d);

  const auto active = active_components(model, t);
  if (active.size() < 2)
    throw Error(ErrorCode::DegenerateGeometry,
                "inter-cluster distance undefined with fewer than two clusters");

  const auto& comps = model.components();
  for (std::size_t a : active) {
    ClusterGeometry c;
    c.component = a;
    const Ball& ball = comps[a];
    double u = std::numeric_limits<double>::infinity();
    for (std::size_t b : active) {
      if (b == a)
        continue;
      const double gap = std::sqrt(squared_distance(ball.center, comps[b].center)) -
                         ball.radius - comps[b].radius;
      u = std::min(u, gap);
    }
    if (!(u > 0.0))
      throw Error(ErrorCode::DegenerateGeometry, "clusters touch");
    c.u = u;
    c.p_max = model.ball_density(a);
    c.volume = model.ball_volume(a);
    c.beta = c.p_max * c.volume;
    c.beta_tilde = c.beta;
    c.nu_max = ball.radius;
    c.kappa = ball.radius;
    const double lens = ball_intersection_volume(d, ball.radius, u, ball.radius);
    c.rho = c.p_max * lens;
    c.overlap = lens / (g.eta_d * std::pow(u, d));
    g.clusters.push_back(c);
  }
  return g;
}

bool in_boundary_strip(const DensityModel& model,
                       double t,
                       double eps,
                       std::span<const double> x)
{
  const double level = t - 2.0 * eps;
  if (!model.background() || model.background_density() < level)
    return false;
  if (!model.background()->region.contains(x))
    return false;
  bool cluster_in_box = false;
  for (std::size_t i : active_components(model, t))
    cluster_in_box = cluster_in_box || model.ball_in_background(i);
  return cluster_in_box && density_at(model, x) < t;
}

double boundary_strip_mass(const DensityModel& model, double t, double eps)
{
  const double level = t - 2.0 * eps;
  if (!model.background() || model.background_density() < level)
    return 0.0;
  const auto active = active_components(model, t);
  bool cluster_in_box = false;
  for (std::size_t i : active)
    cluster_in_box = cluster_in_box || model.ball_in_background(i);
  if (!cluster_in_box)
    return 0.0;
  double mass = model.background()->mass;
  for (std::size_t i = 0; i < model.components().size(); ++i) {
    if (!model.ball_in_background(i))
      continue;
    const bool is_active = std::find(active.begin(), active.end(), i) != active.end();
    if (is_active)
      mass -= model.background_density() * model.ball_volume(i);
    else
      mass += model.components()[i].mass;
  }
  return mass;
}

double boundary_mass_constant(const DensityModel& model, double t)
{
  const int d = model.dimension();
  double total = 0.0;
  for (std::size_t i : active_components(model, t)) {
    const double surface =
      d * unit_ball_volume(d) * std::pow(model.components()[i].radius, d - 1);
    total += model.background_density() * surface;
  }
  return total;
}

double distance_to_support_boundary(const DensityModel& model,
                                    std::span<const double> x)
{
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : model.components())
    best = std::min(best, std::abs(std::sqrt(squared_distance(x, c.center)) - c.radius));
  if (model.background()) {
    const Box& box = model.background()->region;
    if (box.contains(x)) {
      for (std::size_t j = 0; j < x.size(); ++j)
        best = std::min({ best, x[j] - box.lower[j], box.upper[j] - x[j] });
    } else {
      best = std::min(best, distance_to_box(box, x));
    }
  }
  return best;
}

} // namespace knnclust
