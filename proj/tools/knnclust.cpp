// knnclust: sample, identify, sweep, theory and schedule from the command line.

#include "knnclust/error.hpp"
#include "knnclust/harness/config.hpp"
#include "knnclust/harness/sweep.hpp"
#include "knnclust/harness/trial.hpp"
#include "knnclust/identify.hpp"
#include "knnclust/kde.hpp"
#include "knnclust/theory.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace knnclust;
using harness::ExperimentConfig;

constexpr int kExitConfig = 2;

struct Overrides
{
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::string> flavor;
  std::optional<std::string> mode;
  std::vector<std::size_t> n;
  std::optional<std::size_t> k;
  std::optional<double> t, eps, h, delta, radius;
  std::size_t jobs = 0;
};

ExperimentConfig load(const Overrides& o)
{
  auto cfg = harness::load_config(o.config);
  if (o.seed)
    cfg.seed = *o.seed;
  if (o.flavor)
    cfg.flavors = { parse_flavor(*o.flavor) };
  if (o.mode)
    cfg.mode = harness::parse_mode(*o.mode);
  if (!o.n.empty())
    cfg.ns = o.n;
  if (o.t)
    cfg.t = *o.t;
  if (o.eps)
    cfg.eps = harness::RateSpec{ false, *o.eps };
  if (o.h)
    cfg.h = harness::RateSpec{ false, *o.h };
  if (o.delta)
    cfg.delta = *o.delta;
  return cfg;
}

std::ostream& output(const std::string& path, std::ofstream& file)
{
  if (path.empty() || path == "-")
    return std::cout;
  file.open(path, std::ios::binary);
  if (!file)
    throw Error(ErrorCode::IoError, "cannot write " + path);
  return file;
}

int cmd_sample(const Overrides& o)
{
  auto cfg = load(o);
  const auto n = cfg.ns.front();
  const auto cloud = sample(cfg.model, n, cfg.seed);
  std::ofstream file;
  auto& os = output(o.out, file);
  for (std::size_t j = 0; j < cloud.dimension(); ++j)
    os << (j ? "," : "") << 'x' << (j + 1);
  os << '\n';
  char buf[32];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    auto p = cloud[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", p[j]);
      os << (j ? "," : "") << buf;
    }
    os << '\n';
  }
  return 0;
}

int cmd_identify(const Overrides& o)
{
  auto cfg = load(o);
  const auto n = cfg.ns.front();
  const auto flavor = cfg.flavors.front();
  const auto cloud = sample(cfg.model, n, cfg.seed);

  double param = 0.0;
  if (flavor == Flavor::Epsilon) {
    if (!o.radius)
      throw Error(ErrorCode::ConfigError, "the epsilon graph needs --radius");
    param = *o.radius;
  } else {
    param = static_cast<double>(o.k ? *o.k : cfg.k_values(n, flavor).front());
  }
  auto graph = build_graph(cloud, flavor, param);

  ClusterResult result = [&] {
    if (cfg.mode == harness::Mode::NoiseFree)
      return identify_noisefree(std::move(graph));
    const double eps = cfg.eps_at(n);
    const auto est = kde_at_samples(cloud, cfg.h_at(n));
    return identify_noisy(std::move(graph), est, cfg.t - eps, cfg.delta);
  }();
  std::ofstream file;
  write_label_file(output(o.out, file), result);
  std::cerr << "components=" << result.partition.count() << '\n';
  return 0;
}

int cmd_sweep(const Overrides& o)
{
  auto cfg = load(o);
  if (!o.out.empty())
    cfg.out = o.out;
  cfg.validate();
  std::size_t jobs = o.jobs ? o.jobs : std::max(1u, std::thread::hardware_concurrency());
  const auto result = harness::sweep(cfg, jobs);
  harness::write_outputs(cfg.out, result);
  std::size_t errors = 0;
  for (const auto& r : result.records)
    errors += r.error.empty() ? 0 : 1;
  std::cout << "records=" << result.records.size() << " errors=" << errors
            << " out=" << cfg.out << '\n';
  for (const auto& [key, k] : result.best_k)
    std::cout << "best_k n=" << key.first << " flavor=" << to_string(key.second) << " k=" << k
              << '\n';
  return 0;
}

void print_rate(const char* label, const RateBound& r)
{
  std::printf("%s: gamma=%.6g k_opt=%zu k_opt_real=%.6g omega=%.6g prefactor=%.6g "
              "exponent=%.6g bound=%.6g\n",
              label, r.gamma, r.k.k, r.k.real, r.omega, r.prefactor, r.exponent, r.bound);
}

int cmd_theory(const Overrides& o)
{
  auto cfg = load(o);
  TheoryInputs in;
  in.geometry = geometry_quantities(cfg.model, cfg.t, cfg.eps_tilde);
  in.delta = cfg.delta;
  in.c2 = cfg.c2;
  const auto& g = in.geometry;
  std::printf("model=%s d=%d t=%.6g clusters=%zu rho_min=%.6g p_max=%.6g\n",
              cfg.model.id().c_str(), g.d, g.t, g.clusters.size(), g.rho_min(), g.p_max());
  for (std::size_t i = 0; i < g.clusters.size(); ++i) {
    const auto& c = g.clusters[i];
    std::printf("cluster %zu: component=%zu beta=%.6g beta_tilde=%.6g u=%.6g rho=%.6g "
                "p_max=%.6g nu_max=%.6g volume=%.6g overlap=%.6g\n",
                i + 1, c.component, c.beta, c.beta_tilde, c.u, c.rho, c.p_max, c.nu_max,
                c.volume, c.overlap);
  }
  const bool noisy = cfg.h.has_value();
  for (auto flavor : cfg.flavors) {
    for (auto n : cfg.ns) {
      in.n = n;
      in.eps = cfg.eps_at(n);
      if (noisy)
        in.h = cfg.h_at(n);
      std::printf("\n[n=%zu flavor=%s]\n", n, std::string(to_string(flavor)).c_str());
      const auto all = omega_rates(in, Scenario::NoiseFree, Scope::AllClusters, flavor);
      std::printf("gamma=%.6g\nk_opt=%zu\nomega_noisefree=%.6g\nbound_noisefree=%.6g\n",
                  all.gamma, all.k.k, all.omega, all.bound);
      if (noisy) {
        const auto nz = omega_rates(in, Scenario::Noisy, Scope::AllClusters, flavor);
        std::printf("omega_noisy=%.6g\nbound_noisy=%.6g\n", nz.omega, nz.bound);
      }
      for (std::size_t i = 0; i < g.clusters.size(); ++i) {
        char label[64];
        std::snprintf(label, sizeof label, "cluster %zu noisefree", i + 1);
        print_rate(label, omega_rates(in, Scenario::NoiseFree, Scope::OneCluster, flavor, i));
        if (noisy) {
          std::snprintf(label, sizeof label, "cluster %zu noisy", i + 1);
          print_rate(label, omega_rates(in, Scenario::Noisy, Scope::OneCluster, flavor, i));
        }
        const auto w = condition1_window(in, i, flavor);
        std::printf("cluster %zu window: k_low=%lld k_high=%lld feasible=%s "
                    "(connectivity<=%.6g isolation<%.6g)\n",
                    i + 1, w.k_low, w.k_high, w.feasible ? "yes" : "no",
                    w.connectivity_upper, w.isolation_upper);
      }
    }
    std::printf("\n[bound curve flavor=%s]\nn,k_opt,omega,exponent,bound\n",
                std::string(to_string(flavor)).c_str());
    in.n = 0;
    for (const auto& p : bound_curve(in, Scenario::NoiseFree, Scope::AllClusters, flavor, 0,
                                     cfg.ns))
      std::printf("%zu,%zu,%.6g,%.6g,%.6g\n", p.n, p.rate.k.k, p.rate.omega,
                  p.rate.exponent, p.rate.bound);
  }
  return 0;
}

int cmd_schedule(const std::vector<std::size_t>& ns, int d, double h0, double eps0)
{
  if (ns.empty())
    throw Error(ErrorCode::ConfigError, "schedule needs at least one --n");
  std::printf("n,h_n,eps_n\n");
  for (auto n : ns) {
    const auto s = exact_id_schedule(static_cast<double>(n), d, h0, eps0);
    std::printf("%zu,%.6g,%.6g\n", n, s.h, s.eps);
  }
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{ "Cluster identification with k-nearest-neighbour graphs" };
  // "-h" is taken by the bandwidth option.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  Overrides o;
  auto common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", o.config, "Experiment config (INI)");
    if (needs_config)
      c->required();
    sub->add_option("--seed", o.seed, "Base seed");
    sub->add_option("--out", o.out, "Output file or directory");
    sub->add_option("--flavor", o.flavor, "mutual|symmetric|epsilon");
    sub->add_option("--mode", o.mode, "noisefree|noisy");
    sub->add_option("--n", o.n, "Sample size(s)");
    sub->add_option("--t", o.t, "Density level");
    sub->add_option("--eps", o.eps, "Pruning tolerance");
    sub->add_option("--h", o.h, "Kernel bandwidth");
    sub->add_option("--delta", o.delta, "Minimum component fraction");
  };

  auto* sample_cmd = app.add_subcommand("sample", "Draw a point cloud from the model");
  common(sample_cmd, true);
  auto* identify_cmd = app.add_subcommand("identify", "Run one pipeline and print labels");
  common(identify_cmd, true);
  identify_cmd->add_option("--k", o.k, "Neighbour count");
  identify_cmd->add_option("--radius", o.radius, "Radius for the epsilon graph");
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the configured Monte Carlo grid");
  common(sweep_cmd, true);
  sweep_cmd->add_option("--jobs", o.jobs, "Worker threads (default: all cores)");
  auto* theory_cmd = app.add_subcommand("theory", "Print rates, optimal k and k windows");
  common(theory_cmd, true);

  std::vector<std::size_t> sched_n;
  int sched_d = 2;
  double h0 = 1.0, eps0 = 1.0;
  auto* schedule_cmd = app.add_subcommand("schedule", "Print the (h_n, eps_n) schedule");
  schedule_cmd->add_option("--n", sched_n, "Sample size(s)")->required();
  schedule_cmd->add_option("--d", sched_d, "Dimension")->check(CLI::PositiveNumber);
  schedule_cmd->add_option("--h0", h0, "Bandwidth constant");
  schedule_cmd->add_option("--eps0", eps0, "Tolerance constant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n' << app.help();
    return kExitConfig;
  }

  try {
    if (*sample_cmd)
      return cmd_sample(o);
    if (*identify_cmd)
      return cmd_identify(o);
    if (*sweep_cmd)
      return cmd_sweep(o);
    if (*theory_cmd)
      return cmd_theory(o);
    if (*schedule_cmd)
      return cmd_schedule(sched_n, sched_d, h0, eps0);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitConfig;
}
