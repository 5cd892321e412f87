#include "knnclust/harness/trial.hpp"

#include "knnclust/error.hpp"
#include "knnclust/kde.hpp"
#include "knnclust/rng.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ostream>

namespace knnclust::harness {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string describe(const Error& e)
{
  return e.what();
}

std::string sanitize(std::string s)
{
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '"')
      c = (c == ',') ? ';' : ' ';
  return s;
}

void put(std::ostream& os, double v)
{
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  os.write(buf, end - buf);
}

} // namespace

std::uint64_t trial_seed(std::uint64_t base, std::size_t n, std::size_t trial)
{
  return hash_combine(hash_combine(base, static_cast<std::uint64_t>(n)),
                      static_cast<std::uint64_t>(trial));
}

int cluster_count(const ExperimentConfig& config)
{
  if (config.t <= config.model.background_density())
    return 0;
  return static_cast<int>(active_components(config.model, config.t).size());
}

TrialContext::TrialContext(const ExperimentConfig& config,
                           std::size_t n,
                           std::size_t trial,
                           std::size_t k_max)
  : config_(config)
  , n_(n)
  , trial_(trial)
  , seed_(trial_seed(config.seed, n, trial))
  , m_(cluster_count(config))
{
  const auto start = Clock::now();
  try {
    eps_ = config.eps_at(n);
    cloud_.emplace(sample(config.model, n, seed_));
    truth_.emplace(ground_truth(config.model, *cloud_, config.t));
    lists_.emplace(knn_sets(*cloud_, k_max));
    if (config.mode == Mode::Noisy) {
      h_ = config.h_at(n);
      estimate_.emplace(kde_at_samples(*cloud_, h_));
    }
  } catch (const Error& e) {
    error_ = describe(e);
  }
  setup_seconds_ = seconds_since(start);
}

TrialRecord TrialContext::blank(std::size_t k, Flavor flavor) const
{
  TrialRecord r;
  r.n = n_;
  r.k = k;
  r.flavor = flavor;
  r.mode = config_.mode;
  r.trial = trial_;
  r.seed = seed_;
  r.eps = eps_;
  r.h = h_;
  const auto m = static_cast<std::size_t>(m_);
  r.rough.assign(m, 0);
  r.event_a.assign(m, 0);
  r.event_b.assign(m, 0);
  r.event_i.assign(m, 0);
  r.connected.assign(m, 0);
  r.r_tilde_max.assign(m, 0.0);
  return r;
}

TrialRecord TrialContext::run(std::size_t k, Flavor flavor) const
{
  const auto start = Clock::now();
  TrialRecord r = blank(k, flavor);
  if (error_) {
    r.error = sanitize(*error_);
  } else if (config_.mode == Mode::Noisy && config_.t - eps_ <= 0.0) {
    r.error = "ConfigError: t - eps <= 0";
  } else if (k < 1 || k > lists_->k()) {
    r.error = "KOutOfRange: k=" + std::to_string(k);
  } else {
    try {
      const auto lists = lists_->truncated(k);
      auto graph = build_knn_graph(lists, flavor);
      ClusterResult result = config_.mode == Mode::Noisy
                               ? identify_noisy(std::move(graph), *estimate_,
                                                config_.t - eps_, config_.delta)
                               : identify_noisefree(std::move(graph));
      AssessContext ctx{ config_.model, *cloud_, lists,
                         estimate_ ? &*estimate_ : nullptr, eps_, config_.delta };
      const auto report = assess(result, *truth_, ctx);
      r.all_identified = report.all_identified();
      r.event_e = report.event_e;
      r.event_d = report.event_d;
      r.n_cluster = report.n_cluster;
      r.n_no_cluster = report.n_no_cluster;
      r.ratio = report.ratio;
      r.sup_error = report.sup_error;
      r.components = result.partition.count();
      r.no_background_only_component = report.no_background_only_component;
      for (std::size_t i = 0; i < report.clusters.size() && i < r.rough.size(); ++i) {
        const auto& c = report.clusters[i];
        r.rough[i] = c.rough_identified;
        r.event_a[i] = c.event_a;
        r.event_b[i] = c.event_b;
        r.event_i[i] = c.event_i;
        r.connected[i] = c.connected_in_result;
        r.r_tilde_max[i] = c.r_tilde_max;
      }
    } catch (const Error& e) {
      r = blank(k, flavor);
      r.error = sanitize(describe(e));
    }
  }
  r.wall_seconds = setup_seconds_ + seconds_since(start);
  return r;
}

TrialRecord run_trial(const ExperimentConfig& config, const Cell& cell, std::size_t trial)
{
  const std::size_t k_max = std::clamp<std::size_t>(cell.k, 1, cell.n > 1 ? cell.n - 1 : 1);
  TrialContext ctx(config, cell.n, trial, k_max);
  return ctx.run(cell.k, cell.flavor);
}

void write_records_header(std::ostream& os, int m)
{
  auto per = [&](const char* name) {
    for (int i = 1; i <= m; ++i)
      os << ',' << name << '_' << i;
  };
  os << "schema,n,k,flavor,mode,trial,seed";
  per("rough");
  os << ",all_identified";
  per("A");
  per("B");
  os << ",E,D";
  per("I");
  os << ",n_cluster,n_no_cluster";
  per("r_tilde_max");
  os << ",error,ratio,eps,h,sup_error,components,no_background_only_component";
  per("connected");
  os << '\n';
}

void write_record(std::ostream& os, const TrialRecord& r)
{
  auto flags = [&](const std::vector<std::uint8_t>& v) {
    for (auto b : v)
      os << ',' << (b ? 1 : 0);
  };
  os << kRecordsVersion << ',' << r.n << ',' << r.k << ',' << to_string(r.flavor) << ','
     << to_string(r.mode) << ',' << r.trial << ',' << r.seed;
  flags(r.rough);
  os << ',' << (r.all_identified ? 1 : 0);
  flags(r.event_a);
  flags(r.event_b);
  os << ',' << (r.event_e ? 1 : 0) << ',' << (r.event_d ? 1 : 0);
  flags(r.event_i);
  os << ',' << r.n_cluster << ',' << r.n_no_cluster;
  for (double v : r.r_tilde_max) {
    os << ',';
    put(os, v);
  }
  os << ',' << (r.error.empty() ? "none" : r.error) << ',';
  put(os, r.ratio);
  os << ',';
  put(os, r.eps);
  os << ',';
  put(os, r.h);
  os << ',';
  put(os, r.sup_error);
  os << ',' << r.components << ',' << (r.no_background_only_component ? 1 : 0);
  flags(r.connected);
  os << '\n';
}

} // namespace knnclust::harness
