#include "knnclust/harness/config.hpp"

#include "knnclust/error.hpp"
#include "knnclust/kde.hpp"
#include "knnclust/theory.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>

namespace knnclust::harness {

namespace {

namespace pt = boost::property_tree;

[[noreturn]] void fail(const std::string& msg)
{
  throw Error(ErrorCode::ConfigError, msg);
}

std::string trimmed(std::string s)
{
  boost::algorithm::trim(s);
  return s;
}

std::vector<std::string> split_list(const std::string& text, const char* seps = ",")
{
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, boost::algorithm::is_any_of(seps));
  std::vector<std::string> out;
  for (auto& p : parts) {
    auto s = trimmed(p);
    if (!s.empty())
      out.push_back(s);
  }
  return out;
}

double to_double(const std::string& s, const std::string& what)
{
  double v = 0.0;
  auto str = trimmed(s);
  auto [ptr, ec] = std::from_chars(str.data(), str.data() + str.size(), v);
  if (ec != std::errc() || ptr != str.data() + str.size() || !std::isfinite(v))
    fail("bad number for " + what + ": '" + s + "'");
  return v;
}

std::uint64_t to_uint(const std::string& s, const std::string& what)
{
  std::uint64_t v = 0;
  auto str = trimmed(s);
  auto [ptr, ec] = std::from_chars(str.data(), str.data() + str.size(), v);
  if (ec != std::errc() || ptr != str.data() + str.size())
    fail("bad integer for " + what + ": '" + s + "'");
  return v;
}

std::vector<double> to_vector(const std::string& s, const std::string& what)
{
  std::vector<double> out;
  for (auto& p : split_list(s, ", "))
    out.push_back(to_double(p, what));
  return out;
}

std::string required(const pt::ptree& section, const std::string& key, const std::string& where)
{
  auto v = section.get_optional<std::string>(key);
  if (!v)
    fail("missing key '" + key + "' in [" + where + "]");
  return *v;
}

DensityModel parse_model(const pt::ptree& root)
{
  auto model = root.get_child_optional("model");
  if (!model)
    fail("missing [model] section");
  const int d = static_cast<int>(to_uint(required(*model, "dimension", "model"), "dimension"));

  std::map<std::uint64_t, Ball> balls;
  for (const auto& [name, section] : root) {
    if (!boost::algorithm::starts_with(name, "component"))
      continue;
    const auto suffix = name.substr(std::string("component").size());
    const auto idx = to_uint(suffix, "section [" + name + "]");
    Ball b;
    b.center = to_vector(required(section, "center", name), "center");
    b.radius = to_double(required(section, "radius", name), "radius");
    b.mass = to_double(required(section, "mass", name), "mass");
    if (!balls.emplace(idx, std::move(b)).second)
      fail("duplicate section [" + name + "]");
  }
  if (balls.empty())
    fail("no [componentN] sections");
  std::vector<Ball> comps;
  for (auto& [idx, b] : balls)
    comps.push_back(std::move(b));

  std::optional<Background> bg;
  if (auto sec = root.get_child_optional("background")) {
    Background g;
    g.region.lower = to_vector(required(*sec, "lower", "background"), "lower");
    g.region.upper = to_vector(required(*sec, "upper", "background"), "upper");
    g.mass = to_double(required(*sec, "mass", "background"), "mass");
    bg = std::move(g);
  }
  try {
    return make_ball_mixture(d, std::move(comps), std::move(bg));
  } catch (const Error& e) {
    fail(std::string("invalid model: ") + e.what());
  }
}

} // namespace

const char* to_string(Mode mode)
{
  return mode == Mode::Noisy ? "noisy" : "noisefree";
}

Mode parse_mode(const std::string& text)
{
  auto s = boost::algorithm::to_lower_copy(trimmed(text));
  if (s == "noisefree" || s == "noise-free")
    return Mode::NoiseFree;
  if (s == "noisy")
    return Mode::Noisy;
  fail("unknown mode '" + text + "'");
}

KSpec KSpec::parse(const std::string& text)
{
  KSpec spec;
  auto s = trimmed(text);
  if (boost::algorithm::starts_with(s, "optimal")) {
    spec.kind = Kind::Optimal;
    if (s.size() > 7) {
      if (s[7] != ':')
        fail("bad k spec '" + text + "'");
      auto idx = to_uint(s.substr(8), "k cluster");
      if (idx < 1)
        fail("clusters are numbered from 1");
      spec.cluster = idx - 1;
    }
    return spec;
  }
  if (boost::algorithm::starts_with(s, "sweep:")) {
    auto parts = split_list(s.substr(6), ":");
    if (parts.size() != 3)
      fail("k sweep needs lo:hi:step, got '" + text + "'");
    spec.kind = Kind::Sweep;
    spec.lo = to_uint(parts[0], "k sweep lo");
    spec.hi = to_uint(parts[1], "k sweep hi");
    spec.step = to_uint(parts[2], "k sweep step");
    if (spec.lo < 1 || spec.hi < spec.lo || spec.step < 1)
      fail("k sweep needs 1 <= lo <= hi and step >= 1");
    return spec;
  }
  if (boost::algorithm::starts_with(s, "fraction:")) {
    spec.kind = Kind::Fraction;
    for (auto& p : split_list(s.substr(9)))
      spec.fractions.push_back(to_double(p, "k fraction"));
    if (spec.fractions.empty())
      fail("empty k fraction list");
    for (double g : spec.fractions)
      if (!(g >= 0.0 && g <= 1.0))
        fail("k fractions must lie in [0, 1]");
    return spec;
  }
  spec.kind = Kind::Explicit;
  for (auto& p : split_list(s)) {
    auto v = to_uint(p, "k");
    if (v < 1)
      fail("k must be >= 1");
    spec.values.push_back(v);
  }
  if (spec.values.empty())
    fail("empty k list");
  return spec;
}

RateSpec RateSpec::parse(const std::string& text)
{
  RateSpec r;
  auto s = trimmed(text);
  if (boost::algorithm::starts_with(s, "schedule:")) {
    r.scheduled = true;
    r.value = to_double(s.substr(9), "schedule constant");
  } else {
    r.value = to_double(s, "rate");
  }
  if (!(r.value > 0.0))
    fail("rate values must be positive");
  return r;
}

double ExperimentConfig::eps_at(std::size_t n) const
{
  if (!eps)
    return 0.1 * t;
  if (!eps->scheduled)
    return eps->value;
  return exact_id_schedule(static_cast<double>(n), model.dimension(), 1.0, eps->value).eps;
}

double ExperimentConfig::h_at(std::size_t n) const
{
  if (!h)
    fail("bandwidth h is not configured");
  if (!h->scheduled)
    return h->value;
  return exact_id_schedule(static_cast<double>(n), model.dimension(), h->value, 1.0).h;
}

std::vector<std::size_t> ExperimentConfig::k_values(std::size_t n, Flavor flavor) const
{
  if (n < 2)
    fail("n must be at least 2");
  std::vector<std::size_t> out;
  auto clamp = [n](double k) {
    auto r = static_cast<long long>(std::llround(k));
    return static_cast<std::size_t>(std::clamp<long long>(r, 1, static_cast<long long>(n - 1)));
  };
  switch (k.kind) {
    case KSpec::Kind::Explicit:
      for (auto v : k.values)
        if (v <= n - 1)
          out.push_back(v);
      break;
    case KSpec::Kind::Sweep:
      for (std::size_t v = k.lo; v <= k.hi && v <= n - 1; v += k.step)
        out.push_back(v);
      break;
    case KSpec::Kind::Fraction:
      for (double g : k.fractions)
        out.push_back(clamp(static_cast<double>(n - 1) * g + 1.0));
      break;
    case KSpec::Kind::Optimal: {
      TheoryInputs in;
      in.geometry = geometry_quantities(model, t, eps_tilde);
      in.n = n;
      const auto scope = k.cluster ? Scope::OneCluster : Scope::AllClusters;
      const auto cluster = k.cluster.value_or(0);
      if (cluster >= in.geometry.clusters.size())
        fail("optimal k cluster index out of range");
      out.push_back(omega_rates(in, Scenario::NoiseFree, scope, flavor, cluster).k.k);
      break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void ExperimentConfig::validate() const
{
  if (trials < 1)
    fail("trials must be at least 1");
  if (ns.empty())
    fail("empty n list");
  for (auto n : ns)
    if (n < 2)
      fail("n must be at least 2");
  if (!(t > 0.0))
    fail("level t must be positive");
  if (!(delta >= 0.0 && delta < 1.0))
    fail("delta must lie in [0, 1)");
  if (flavors.empty())
    fail("no flavors");
  for (auto f : flavors)
    if (f == Flavor::Epsilon)
      fail("sweeps are indexed by k; the epsilon graph is not supported here");
  if (mode == Mode::Noisy && !h)
    fail("noisy mode needs a bandwidth h");
  if (c2 <= 0.0)
    fail("c2 must be positive");
  if (k.kind == KSpec::Kind::Optimal) {
    try {
      geometry_quantities(model, t, eps_tilde);
    } catch (const Error& e) {
      fail(std::string("k = optimal needs valid cluster geometry: ") + e.what());
    }
  }
}

ExperimentConfig parse_config(std::istream& in)
{
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    fail(std::string("cannot parse config: ") + e.what());
  }

  ExperimentConfig cfg;
  cfg.model = parse_model(root);

  auto exp = root.get_child_optional("experiment");
  if (!exp)
    fail("missing [experiment] section");
  const auto& e = *exp;
  cfg.t = to_double(required(e, "t", "experiment"), "t");
  if (auto v = e.get_optional<std::string>("mode"))
    cfg.mode = parse_mode(*v);
  if (auto v = e.get_optional<std::string>("flavors")) {
    cfg.flavors.clear();
    for (auto& f : split_list(*v)) {
      try {
        cfg.flavors.push_back(parse_flavor(f));
      } catch (const Error& err) {
        fail(err.what());
      }
    }
  }
  for (auto& p : split_list(required(e, "n", "experiment")))
    cfg.ns.push_back(to_uint(p, "n"));
  if (auto v = e.get_optional<std::string>("k"))
    cfg.k = KSpec::parse(*v);
  if (auto v = e.get_optional<std::string>("delta"))
    cfg.delta = to_double(*v, "delta");
  if (auto v = e.get_optional<std::string>("eps"))
    cfg.eps = RateSpec::parse(*v);
  if (auto v = e.get_optional<std::string>("h"))
    cfg.h = RateSpec::parse(*v);
  if (auto v = e.get_optional<std::string>("trials"))
    cfg.trials = to_uint(*v, "trials");
  if (auto v = e.get_optional<std::string>("seed"))
    cfg.seed = to_uint(*v, "seed");
  if (auto v = e.get_optional<std::string>("out"))
    cfg.out = trimmed(*v);
  if (auto v = e.get_optional<std::string>("c2"))
    cfg.c2 = to_double(*v, "c2");
  if (auto v = e.get_optional<std::string>("eps_tilde"))
    cfg.eps_tilde = to_double(*v, "eps_tilde");

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::IoError, "cannot open config file " + path.string());
  return parse_config(in);
}

} // namespace knnclust::harness
