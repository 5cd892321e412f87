#include "knnclust/harness/sweep.hpp"

#include "knnclust/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

namespace knnclust::harness {

namespace {

struct Unit
{
  std::size_t n;
  std::size_t trial;
};

std::string num(double v)
{
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double median(std::vector<double> v)
{
  if (v.empty())
    return 0.0;
  std::sort(v.begin(), v.end());
  const auto mid = v.size() / 2;
  if (v.size() % 2 == 1)
    return v[mid];
  const double a = v[mid - 1], b = v[mid];
  if (std::isinf(a) || std::isinf(b))
    return std::isinf(a) ? a : b;
  return 0.5 * (a + b);
}

} // namespace

SweepResult sweep(const ExperimentConfig& config, std::size_t jobs)
{
  config.validate();
  SweepResult result;
  result.m = cluster_count(config);

  // Cells per n; k values can differ by flavor (k = optimal).
  std::vector<std::vector<Cell>> cells_by_n;
  std::vector<std::size_t> k_max_by_n;
  for (auto n : config.ns) {
    std::vector<Cell> cells;
    std::size_t k_max = 1;
    for (auto f : config.flavors)
      for (auto k : config.k_values(n, f)) {
        cells.push_back({ n, k, f });
        k_max = std::max(k_max, k);
      }
    cells_by_n.push_back(std::move(cells));
    k_max_by_n.push_back(k_max);
  }

  std::vector<Unit> units;
  std::vector<std::size_t> unit_n_index;
  for (std::size_t i = 0; i < config.ns.size(); ++i)
    for (std::size_t t = 0; t < config.trials; ++t) {
      units.push_back({ config.ns[i], t });
      unit_n_index.push_back(i);
    }

  std::vector<std::vector<TrialRecord>> out(units.size());
  std::atomic<std::size_t> next{ 0 };
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const auto u = next.fetch_add(1);
      if (u >= units.size())
        return;
      try {
        const auto ni = unit_n_index[u];
        TrialContext ctx(config, units[u].n, units[u].trial, k_max_by_n[ni]);
        auto& rows = out[u];
        rows.reserve(cells_by_n[ni].size());
        for (const auto& c : cells_by_n[ni])
          rows.push_back(ctx.run(c.k, c.flavor));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
      }
    }
  };

  jobs = std::max<std::size_t>(1, std::min(jobs, units.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j)
      pool.emplace_back(worker);
  }
  if (failure)
    std::rethrow_exception(failure);

  for (auto& rows : out)
    for (auto& r : rows)
      result.records.push_back(std::move(r));
  std::stable_sort(result.records.begin(), result.records.end(), [](const auto& a, const auto& b) {
    if (a.cell() != b.cell())
      return a.cell() < b.cell();
    return a.trial < b.trial;
  });

  result.summary = summarize(result.records, result.m);
  result.best_k = best_k(result.summary);
  return result;
}

std::vector<CellSummary> summarize(const std::vector<TrialRecord>& records, int m)
{
  std::vector<CellSummary> out;
  const auto mm = static_cast<std::size_t>(std::max(m, 0));
  std::size_t i = 0;
  while (i < records.size()) {
    const Cell cell = records[i].cell();
    std::size_t j = i;
    std::size_t errors = 0, all = 0;
    std::vector<std::size_t> per(mm, 0);
    std::vector<double> ratios;
    for (; j < records.size() && records[j].cell() == cell; ++j) {
      const auto& r = records[j];
      if (!r.error.empty()) {
        ++errors;
        continue;
      }
      all += r.all_identified ? 1 : 0;
      for (std::size_t c = 0; c < mm && c < r.rough.size(); ++c)
        per[c] += r.rough[c] ? 1 : 0;
      ratios.push_back(r.ratio);
    }
    CellSummary s;
    s.cell = cell;
    s.errors = errors;
    // Error rows count as failed trials.
    const auto total = j - i;
    s.all = estimate_probability(all, total);
    for (auto c : per)
      s.clusters.push_back(estimate_probability(c, total));
    s.median_ratio = median(std::move(ratios));
    out.push_back(std::move(s));
    i = j;
  }
  return out;
}

std::map<std::pair<std::size_t, Flavor>, std::size_t> best_k(const std::vector<CellSummary>& summary)
{
  std::map<std::pair<std::size_t, Flavor>, std::pair<std::size_t, double>> best;
  for (const auto& s : summary) {
    const auto key = std::make_pair(s.cell.n, s.cell.flavor);
    auto it = best.find(key);
    if (it == best.end())
      best.emplace(key, std::make_pair(s.cell.k, s.all.p_hat));
    else if (s.all.p_hat > it->second.second ||
             (s.all.p_hat == it->second.second && s.cell.k < it->second.first))
      it->second = { s.cell.k, s.all.p_hat };
  }
  std::map<std::pair<std::size_t, Flavor>, std::size_t> out;
  for (const auto& [key, v] : best)
    out.emplace(key, v.first);
  return out;
}

void write_records(std::ostream& os, const SweepResult& result)
{
  write_records_header(os, result.m);
  for (const auto& r : result.records)
    write_record(os, r);
}

void write_summary_csv(std::ostream& os, const SweepResult& result)
{
  os << "n,k,flavor,trials,errors,successes,p_hat,wilson_lower,wilson_upper";
  for (int i = 1; i <= result.m; ++i)
    os << ",successes_" << i << ",p_hat_" << i << ",wilson_lower_" << i << ",wilson_upper_" << i;
  os << ",median_ratio\n";
  for (const auto& s : result.summary) {
    os << s.cell.n << ',' << s.cell.k << ',' << to_string(s.cell.flavor) << ',' << s.all.trials
       << ',' << s.errors << ',' << s.all.successes << ',' << num(s.all.p_hat) << ','
       << num(s.all.lower) << ',' << num(s.all.upper);
    for (const auto& c : s.clusters)
      os << ',' << c.successes << ',' << num(c.p_hat) << ',' << num(c.lower) << ','
         << num(c.upper);
    os << ',' << num(s.median_ratio) << '\n';
  }
}

void write_summary_json(std::ostream& os, const SweepResult& result)
{
  using nlohmann::json;
  auto est = [](const ProbabilityEstimate& e) {
    return json{ { "successes", e.successes },
                 { "trials", e.trials },
                 { "p_hat", e.p_hat },
                 { "wilson", { e.lower, e.upper } } };
  };
  json cells = json::array();
  for (const auto& s : result.summary) {
    json clusters = json::array();
    for (const auto& c : s.clusters)
      clusters.push_back(est(c));
    cells.push_back({ { "n", s.cell.n },
                      { "k", s.cell.k },
                      { "flavor", std::string(to_string(s.cell.flavor)) },
                      { "errors", s.errors },
                      { "all", est(s.all) },
                      { "clusters", std::move(clusters) },
                      { "median_ratio", s.median_ratio } });
  }
  json best = json::array();
  for (const auto& [key, k] : result.best_k)
    best.push_back(
      { { "n", key.first }, { "flavor", std::string(to_string(key.second)) }, { "k", k } });
  json doc{ { "schema", kRecordsVersion },
            { "clusters", result.m },
            { "cells", std::move(cells) },
            { "best_k", std::move(best) } };
  os << doc.dump(2) << '\n';
}

void write_timings(std::ostream& os, const SweepResult& result)
{
  os << "n,k,flavor,trial,wall_seconds\n";
  for (const auto& r : result.records)
    os << r.n << ',' << r.k << ',' << to_string(r.flavor) << ',' << r.trial << ','
       << num(r.wall_seconds) << '\n';
}

void write_outputs(const std::filesystem::path& dir, const SweepResult& result)
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f)
      throw Error(ErrorCode::IoError, "cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("records.csv");
    write_records(f, result);
  }
  {
    auto f = open("summary.csv");
    write_summary_csv(f, result);
  }
  {
    auto f = open("summary.json");
    write_summary_json(f, result);
  }
  {
    auto f = open("best_k.csv");
    f << "n,flavor,k\n";
    for (const auto& [key, k] : result.best_k)
      f << key.first << ',' << to_string(key.second) << ',' << k << '\n';
  }
  {
    auto f = open("timings.csv");
    write_timings(f, result);
  }
}

} // namespace knnclust::harness
