#include "knnclust/error.hpp"
#include "knnclust/harness/config.hpp"
#include "knnclust/harness/stats.hpp"
#include "knnclust/harness/sweep.hpp"
#include "knnclust/harness/trial.hpp"
#include "knnclust/theory.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace knnclust;
using namespace knnclust::harness;

namespace fs = std::filesystem;

namespace {

const fs::path data_dir = KNNCLUST_TEST_DATA;

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  return { std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>() };
}

int run_cli(const std::string& args, const fs::path& log)
{
  const std::string cmd = std::string(KNNCLUST_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name)
{
  auto p = fs::temp_directory_path() / ("knnclust_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ExperimentConfig parse(const std::string& text)
{
  std::istringstream in(text);
  return parse_config(in);
}

const char* kModel = R"(
[model]
dimension = 2
[component1]
center = 0 0
radius = 0.5
mass = 0.5
[component2]
center = 3 0
radius = 0.5
mass = 0.5
)";

} // namespace

TEST_CASE("Wilson interval")
{
  const auto zero = estimate_probability(0, 10);
  CHECK(zero.p_hat == 0.0);
  CHECK(zero.lower == 0.0);
  CHECK(zero.upper == doctest::Approx(0.278).epsilon(1e-3));
  // z^2 / (n + z^2), the closed form for zero successes.
  const double z2 = kWilsonZ95 * kWilsonZ95;
  CHECK(zero.upper == doctest::Approx(z2 / (10 + z2)).epsilon(1e-14));

  const auto all = estimate_probability(10, 10);
  CHECK(all.p_hat == 1.0);
  CHECK(all.upper == 1.0);
  CHECK(all.lower == doctest::Approx(0.722).epsilon(1e-3));

  const auto half = estimate_probability(5, 10);
  CHECK(half.p_hat == 0.5);
  CHECK(0.5 * (half.lower + half.upper) == doctest::Approx(0.5).epsilon(1e-14));

  // Centre is pulled toward 1/2.
  const auto low = estimate_probability(2, 10);
  CHECK(0.5 * (low.lower + low.upper) > 0.2);

  CHECK_THROWS_AS(estimate_probability(0, 0), Error);
  try {
    estimate_probability(0, 0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyCell);
  }
}

TEST_CASE("config parsing and defaults")
{
  const auto c = parse(std::string(kModel) + R"(
[experiment]
t = 0.5
n = 100, 200
)");
  CHECK(c.delta == 0.02);
  CHECK(c.trials == 200);
  CHECK(c.eps_at(100) == doctest::Approx(0.05));
  CHECK(c.flavors == std::vector<Flavor>{ Flavor::Mutual });
  CHECK(c.mode == Mode::NoiseFree);
  CHECK(c.k.kind == KSpec::Kind::Optimal);
  CHECK(c.ns == std::vector<std::size_t>{ 100, 200 });
  CHECK(c.model.components().size() == 2);

  const auto g = geometry_quantities(c.model, 0.5);
  TheoryInputs in;
  in.geometry = g;
  in.n = 100;
  CHECK(c.k_values(100, Flavor::Mutual) ==
        std::vector<std::size_t>{ omega_rates(in, Scenario::NoiseFree, Scope::AllClusters, Flavor::Mutual).k.k });
}

TEST_CASE("k specifications")
{
  const auto base = std::string(kModel) + "[experiment]\nt = 0.5\nn = 101\n";
  CHECK(parse(base + "k = 3, 1, 3, 500\n").k_values(101, Flavor::Mutual) == std::vector<std::size_t>{ 1, 3 });
  CHECK(parse(base + "k = sweep:2:20:6\n").k_values(101, Flavor::Mutual) ==
        std::vector<std::size_t>{ 2, 8, 14, 20 });
  CHECK(parse(base + "k = fraction:0.1, 0.5, 1.0\n").k_values(101, Flavor::Mutual) ==
        std::vector<std::size_t>{ 11, 51, 100 });
  CHECK_THROWS_AS(parse(base + "k = sweep:5:2:1\n"), Error);
  CHECK_THROWS_AS(parse(base + "k = fraction:1.5\n"), Error);
  CHECK_THROWS_AS(parse(base + "k = 0\n"), Error);
}

TEST_CASE("rate schedules")
{
  const auto c = parse(std::string(kModel) + R"(
[experiment]
t = 0.5
n = 500
mode = noisy
h = schedule:0.3
eps = schedule:1.5
)");
  const auto s = exact_id_schedule(500, 2, 0.3, 1.5);
  CHECK(c.h_at(500) == doctest::Approx(s.h).epsilon(1e-15));
  CHECK(c.eps_at(500) == doctest::Approx(s.eps).epsilon(1e-15));
}

TEST_CASE("config validation")
{
  auto code = [](const std::string& text) {
    try {
      parse(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  const auto ex = std::string(kModel) + "[experiment]\nt = 0.5\nn = 100\n";
  CHECK(code(ex + "trials = 0\n") == ErrorCode::ConfigError);
  CHECK(code(ex + "mode = noisy\n") == ErrorCode::ConfigError);
  CHECK(code(ex + "flavors = epsilon\n") == ErrorCode::ConfigError);
  CHECK(code(ex + "delta = 1.0\n") == ErrorCode::ConfigError);
  CHECK(code(ex + "mode = sideways\n") == ErrorCode::ConfigError);
  CHECK(code(std::string(kModel)) == ErrorCode::ConfigError);
  CHECK(code("[experiment]\nt = 1\nn = 5\n") == ErrorCode::ConfigError);
  CHECK(code("[model]\ndimension = 2\n[component1]\ncenter = 0 0\nradius = 1\nmass = 0.7\n"
             "[experiment]\nt = 0.1\nn = 5\n") == ErrorCode::ConfigError);
  CHECK(code("not an ini file [") == ErrorCode::ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/model.ini"), Error);
}

TEST_CASE("run_trial")
{
  auto c = load_config(data_dir / "two_disks.ini");
  const Cell cell{ 50, 1, Flavor::Mutual };
  const auto r = run_trial(c, cell, 0);
  CHECK(r.error.empty());
  CHECK(r.n == 50);
  CHECK(r.k == 1);
  CHECK(r.rough.size() == 2);
  CHECK(r.event_a.size() == 2);
  CHECK(r.event_b.size() == 2);
  CHECK(r.event_i.size() == 2);
  CHECK(r.r_tilde_max.size() == 2);
  CHECK(r.event_d);
  CHECK(r.event_e);
  CHECK(r.n_cluster + r.n_no_cluster == 50);
  CHECK(r.seed == trial_seed(c.seed, 50, 0));

  std::ostringstream a, b;
  write_record(a, r);
  write_record(b, run_trial(c, cell, 0));
  CHECK(a.str() == b.str());

  // t - eps <= 0 in noisy mode is reported in the row.
  c.mode = Mode::Noisy;
  c.h = RateSpec{ false, 0.2 };
  c.eps = RateSpec{ false, 1.0 };
  const auto bad = run_trial(c, cell, 0);
  CHECK(bad.error.find("ConfigError") != std::string::npos);
  CHECK_FALSE(bad.all_identified);
  CHECK(bad.rough.size() == 2);
}

TEST_CASE("trial seeds do not collide")
{
  std::set<std::uint64_t> seen;
  std::size_t count = 0;
  for (std::uint64_t base : { 1u, 2u, 12345u })
    for (std::size_t n : { 100u, 200u, 400u, 800u, 1600u, 3200u })
      for (std::size_t t = 0; t < 2000; ++t) {
        seen.insert(trial_seed(base, n, t));
        ++count;
      }
  CHECK(seen.size() == count);
}

TEST_CASE("sweep summary is consistent with records")
{
  const auto c = load_config(data_dir / "two_disks.ini");
  const auto res = sweep(c, 2);
  CHECK(res.m == 2);
  CHECK(res.records.size() == 2 * 4 * 2 * 12);
  CHECK(res.summary.size() == 2 * 4 * 2);
  for (const auto& s : res.summary) {
    std::size_t succ = 0, rows = 0;
    for (const auto& r : res.records)
      if (r.cell() == s.cell) {
        ++rows;
        succ += (r.all_identified && r.error.empty()) ? 1 : 0;
      }
    CHECK(rows == s.all.trials);
    CHECK(succ == s.all.successes);
    if (s.all.successes == s.all.trials)
      CHECK(s.all.upper == 1.0);
  }
  for (std::size_t i = 1; i < res.records.size(); ++i) {
    const auto& a = res.records[i - 1];
    const auto& b = res.records[i];
    CHECK((a.cell() < b.cell() || (a.cell() == b.cell() && a.trial < b.trial)));
  }
  // Best k: highest p_hat, smallest k among ties.
  for (const auto& [key, k] : res.best_k) {
    double best = -1.0;
    std::size_t arg = 0;
    for (const auto& s : res.summary)
      if (s.cell.n == key.first && s.cell.flavor == key.second && s.all.p_hat > best) {
        best = s.all.p_hat;
        arg = s.cell.k;
      }
    CHECK(k == arg);
  }
  CHECK_THROWS_AS(summarize({}, 2).at(0), std::out_of_range);
}

TEST_CASE("sweep output is identical across job counts")
{
  const auto c = load_config(data_dir / "noisy_small.ini");
  std::ostringstream a, b;
  write_records(a, sweep(c, 1));
  write_records(b, sweep(c, 4));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("schema,n,k,flavor,mode,trial,seed,rough_1,rough_2,all_identified", 0) == 0);
}

TEST_CASE("summary json mirrors the csv")
{
  const auto c = load_config(data_dir / "noisy_small.ini");
  const auto res = sweep(c, 1);
  std::ostringstream js;
  write_summary_json(js, res);
  CHECK(js.str().find("\"schema\": \"knnclust-records-v1\"") != std::string::npos);
  CHECK(js.str().find("\"best_k\"") != std::string::npos);
}

TEST_CASE("cli")
{
  const auto dir = scratch("cli");
  const auto log = dir / "log.txt";

  CHECK(run_cli("theory --config " + (data_dir / "two_disks.ini").string() + " --n 1000 --flavor mutual", log) == 0);
  const auto theory = slurp(log);
  CHECK(theory.find("gamma=0.242424") != std::string::npos);
  CHECK(theory.find("k_opt=243") != std::string::npos);

  CHECK(run_cli("identify --config /nonexistent/model.ini", log) == 2);
  const auto diag = slurp(log);
  CHECK(std::count(diag.begin(), diag.end(), '\n') == 1);

  CHECK(run_cli("frobnicate", log) == 2);
  CHECK(slurp(log).find("Usage") != std::string::npos);
  CHECK(run_cli("sweep --config " + (data_dir / "bad_trials.ini").string(), log) == 2);

  CHECK(run_cli("sample --config " + (data_dir / "two_disks.ini").string() + " --n 5 --seed 3 --out " +
                  (dir / "pts.csv").string(),
                log) == 0);
  CHECK(slurp(dir / "pts.csv").rfind("x1,x2\n", 0) == 0);

  CHECK(run_cli("identify --config " + (data_dir / "two_disks.ini").string() +
                  " --n 40 --k 5 --flavor symmetric --out " + (dir / "labels.txt").string(),
                log) == 0);
  const auto labels = slurp(dir / "labels.txt");
  CHECK(std::count(labels.begin(), labels.end(), '\n') == 40);
  CHECK(labels.rfind("0 ", 0) == 0);

  CHECK(run_cli("schedule --n 1000 --d 2 --h0 0.5 --eps0 0.25", log) == 0);
  CHECK(slurp(log).rfind("n,h_n,eps_n\n1000,", 0) == 0);

  const auto cfg = (data_dir / "noisy_small.ini").string();
  CHECK(run_cli("sweep --config " + cfg + " --jobs 1 --out " + (dir / "a").string(), log) == 0);
  CHECK(run_cli("sweep --config " + cfg + " --jobs 3 --out " + (dir / "b").string(), log) == 0);
  CHECK(slurp(dir / "a" / "records.csv") == slurp(dir / "b" / "records.csv"));
  CHECK(slurp(dir / "a" / "summary.csv") == slurp(dir / "b" / "summary.csv"));
  CHECK(fs::exists(dir / "a" / "summary.json"));
  CHECK(fs::exists(dir / "a" / "timings.csv"));
  CHECK(fs::exists(dir / "a" / "best_k.csv"));
}
