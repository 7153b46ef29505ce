#include "drlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "drlab/csv.hpp"
#include "drlab/policy_names.hpp"

namespace drlab {
namespace {

constexpr std::uint64_t kPopulationStream = 1ULL << 32;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double out;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for " + key + ": " + value);
  }
  if (used != value.size())
    throw std::invalid_argument("config: bad number for " + key + ": " + value);
  return out;
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  std::int64_t out;
  try {
    out = std::stoll(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer for " + key + ": " + value);
  }
  if (used != value.size())
    throw std::invalid_argument("config: bad integer for " + key + ": " + value);
  return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  std::uint64_t out;
  try {
    out = std::stoull(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer for " + key + ": " + value);
  }
  if (used != value.size())
    throw std::invalid_argument("config: bad integer for " + key + ": " + value);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw std::invalid_argument("config: bad boolean for " + key + ": " + value);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split_list(value))
    out.push_back(parse_double(key, item));
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += items[i];
  }
  return out;
}

std::string join_doubles(const std::vector<double>& items) {
  std::vector<std::string> text;
  text.reserve(items.size());
  for (double v : items) text.push_back(format_double(v));
  return join(text);
}

void apply(ExperimentConfig& cfg, const std::string& key,
           const std::string& value) {
  if (key == "model.kind") cfg.model_kind = value;
  else if (key == "model.n") cfg.population.n = parse_int(key, value);
  else if (key == "model.a_lo") cfg.population.a_lo = parse_double(key, value);
  else if (key == "model.a_hi") cfg.population.a_hi = parse_double(key, value);
  else if (key == "model.b_mean") cfg.population.b_mean = parse_double(key, value);
  else if (key == "model.b_hi") cfg.population.b_hi = parse_double(key, value);
  else if (key == "model.shock_scale")
    cfg.population.shock_scale = parse_double(key, value);
  else if (key == "model.shock_lo")
    cfg.population.shock_lo = parse_double(key, value);
  else if (key == "model.shock_hi")
    cfg.population.shock_hi = parse_double(key, value);
  else if (key == "model.a") cfg.direct_a = parse_double(key, value);
  else if (key == "model.b") cfg.direct_b = parse_double(key, value);
  else if (key == "model.box_a_lo") cfg.direct_box_a_lo = parse_double(key, value);
  else if (key == "model.box_a_hi") cfg.direct_box_a_hi = parse_double(key, value);
  else if (key == "model.box_b_hi") cfg.direct_box_b_hi = parse_double(key, value);
  else if (key == "model.shock") cfg.direct_shock = value;
  else if (key == "policy.alpha") cfg.policy.alpha = parse_double(key, value);
  else if (key == "policy.rho") cfg.policy.rho = parse_double(key, value);
  else if (key == "policy.r") cfg.policy.r = parse_double(key, value);
  else if (key == "policy.clamp") {
    if (value == "interval") cfg.policy.clamp = ClampMode::kInterval;
    else if (value == "none") cfg.policy.clamp = ClampMode::kNone;
    else
      throw std::invalid_argument(
          "config: policy.clamp must be interval or none");
  } else if (key == "policy.warm_price1")
    cfg.policy.warm_price1 = parse_double(key, value);
  else if (key == "policy.warm_price2")
    cfg.policy.warm_price2 = parse_double(key, value);
  else if (key == "cost.kind") cfg.cost_kind = value;
  else if (key == "cost.wholesale") cfg.cost_wholesale = parse_double(key, value);
  else if (key == "cost.retail") cfg.cost_retail = parse_double(key, value);
  else if (key == "cost.center") cfg.cost_center = parse_double(key, value);
  else if (key == "cost.sigma") cfg.cost_sigma = parse_double(key, value);
  else if (key == "cost.values") cfg.cost_values = parse_double_list(key, value);
  else if (key == "run.horizon") cfg.horizon = parse_int(key, value);
  else if (key == "run.reps") cfg.reps = parse_int(key, value);
  else if (key == "run.seed") cfg.seed = parse_uint(key, value);
  else if (key == "run.out") cfg.out_dir = value;
  else if (key == "run.policies") cfg.policies = split_list(value);
  else if (key == "run.trace_reps") cfg.trace_reps = parse_int(key, value);
  else if (key == "mc.quantile_samples")
    cfg.quantile_samples = parse_int(key, value);
  else if (key == "mc.population_redraw")
    cfg.population_redraw = parse_bool(key, value);
  else
    throw std::invalid_argument("config: unknown key: " + key);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    const auto stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not key = value");
    const auto key = trim(stripped.substr(0, eq));
    const auto value = trim(stripped.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " has an empty key");
    apply(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("cannot open config file " + path);
  std::string text;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof(buf), f)) > 0) text.append(buf, got);
  std::fclose(f);
  return parse_config(text);
}

void ExperimentConfig::validate() const {
  if (model_kind != "population" && model_kind != "direct")
    throw std::invalid_argument("config: model.kind must be population or direct");
  if (model_kind == "population") {
    population.validate();
    ShockDistribution::truncated_normal(population.shock_scale,
                                        population.shock_lo,
                                        population.shock_hi);
  } else {
    const ParamBox box{direct_box_a_lo, direct_box_a_hi, direct_box_b_hi};
    box.validate();
    if (!(direct_a > 0.0))
      throw std::invalid_argument("config: model.a must be positive");
    if (!box.contains({direct_a, direct_b}))
      throw std::invalid_argument("config: direct theta outside its param box");
    if (direct_shock != "uniform" && direct_shock != "truncnormal")
      throw std::invalid_argument(
          "config: model.shock must be uniform or truncnormal");
  }
  policy.validate();
  if (policy.warm_price1 && policy.warm_price2 &&
      *policy.warm_price1 == *policy.warm_price2)
    throw std::invalid_argument("config: warm-start prices must be distinct");
  if (cost_kind == "constant") {
    if (!(cost_wholesale >= cost_retail))
      throw std::invalid_argument("config: cost.wholesale must be >= cost.retail");
  } else if (cost_kind == "sequence") {
    if (static_cast<std::int64_t>(cost_values.size()) < horizon)
      throw std::invalid_argument("config: cost sequence shorter than horizon");
  } else if (cost_kind != "alternating") {
    throw std::invalid_argument(
        "config: cost.kind must be constant, alternating, or sequence");
  }
  make_costs();
  if (horizon < 3)
    throw std::invalid_argument("config: run.horizon: T >= 3 required");
  if (reps < 1) throw std::invalid_argument("config: run.reps >= 1 required");
  if (trace_reps < 0 || trace_reps > reps)
    throw std::invalid_argument("config: run.trace_reps out of [0, reps]");
  if (policies.empty())
    throw std::invalid_argument("config: run.policies must name a policy");
  std::set<std::string> seen;
  for (const auto& name : policies) {
    parse_policy_kind(name);
    if (!seen.insert(name).second)
      throw std::invalid_argument("config: duplicate policy " + name);
  }
  if (quantile_samples < 1)
    throw std::invalid_argument("config: mc.quantile_samples >= 1 required");
}

std::string ExperimentConfig::canonical() const {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("model.kind", model_kind);
  kv.emplace_back("model.n", std::to_string(population.n));
  kv.emplace_back("model.a_lo", format_double(population.a_lo));
  kv.emplace_back("model.a_hi", format_double(population.a_hi));
  kv.emplace_back("model.b_mean", format_double(population.b_mean));
  kv.emplace_back("model.b_hi", format_double(population.b_hi));
  kv.emplace_back("model.shock_scale", format_double(population.shock_scale));
  kv.emplace_back("model.shock_lo", format_double(population.shock_lo));
  kv.emplace_back("model.shock_hi", format_double(population.shock_hi));
  kv.emplace_back("model.a", format_double(direct_a));
  kv.emplace_back("model.b", format_double(direct_b));
  kv.emplace_back("model.box_a_lo", format_double(direct_box_a_lo));
  kv.emplace_back("model.box_a_hi", format_double(direct_box_a_hi));
  kv.emplace_back("model.box_b_hi", format_double(direct_box_b_hi));
  kv.emplace_back("model.shock", direct_shock);
  kv.emplace_back("policy.alpha", format_double(policy.alpha));
  kv.emplace_back("policy.rho", format_double(policy.rho));
  kv.emplace_back("policy.r", format_double(policy.r));
  kv.emplace_back("policy.clamp",
                  policy.clamp == ClampMode::kInterval ? "interval" : "none");
  if (policy.warm_price1)
    kv.emplace_back("policy.warm_price1", format_double(*policy.warm_price1));
  if (policy.warm_price2)
    kv.emplace_back("policy.warm_price2", format_double(*policy.warm_price2));
  kv.emplace_back("cost.kind", cost_kind);
  kv.emplace_back("cost.wholesale", format_double(cost_wholesale));
  kv.emplace_back("cost.retail", format_double(cost_retail));
  kv.emplace_back("cost.center", format_double(cost_center));
  kv.emplace_back("cost.sigma", format_double(cost_sigma));
  kv.emplace_back("cost.values", join_doubles(cost_values));
  kv.emplace_back("run.horizon", std::to_string(horizon));
  kv.emplace_back("run.reps", std::to_string(reps));
  kv.emplace_back("run.seed", std::to_string(seed));
  kv.emplace_back("run.out", out_dir);
  kv.emplace_back("run.policies", join(policies));
  kv.emplace_back("run.trace_reps", std::to_string(trace_reps));
  kv.emplace_back("mc.quantile_samples", std::to_string(quantile_samples));
  kv.emplace_back("mc.population_redraw",
                  population_redraw ? "true" : "false");
  std::sort(kv.begin(), kv.end());
  std::string out;
  for (const auto& [key, value] : kv) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  }
  return out;
}

std::uint64_t ExperimentConfig::digest() const {
  const auto text = canonical();
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

CostSequence ExperimentConfig::make_costs() const {
  if (cost_kind == "constant")
    return CostSequence::constant(cost_wholesale - cost_retail);
  if (cost_kind == "alternating")
    return CostSequence::alternating(cost_center, cost_sigma);
  return CostSequence::sequence(cost_values);
}

std::vector<DemandModel> ExperimentConfig::make_models() const {
  std::vector<DemandModel> models;
  if (model_kind == "direct") {
    const auto shock =
        direct_shock == "uniform"
            ? ShockDistribution::uniform(population.shock_lo,
                                         population.shock_hi)
            : ShockDistribution::truncated_normal(population.shock_scale,
                                                  population.shock_lo,
                                                  population.shock_hi);
    models.push_back(DemandModel::direct(
        {direct_a, direct_b},
        shock, {direct_box_a_lo, direct_box_a_hi, direct_box_b_hi}));
    return models;
  }
  // One aggregate shock law shared by every model so its quantile table is
  // built once per process.
  const auto aggregate = ShockDistribution::aggregate_iid(
      ShockDistribution::truncated_normal(population.shock_scale,
                                          population.shock_lo,
                                          population.shock_hi),
      population.n, quantile_samples);
  const auto build = [&](std::uint64_t pop_seed) {
    auto pop = make_population(population, pop_seed);
    DemandModel m{pop.aggregate, aggregate, population.box(), std::nullopt};
    m.population = std::move(pop);
    return m;
  };
  if (!population_redraw) {
    models.push_back(build(substream_seed(seed, kPopulationStream)));
  } else {
    models.reserve(static_cast<std::size_t>(reps));
    for (std::int64_t rep = 0; rep < reps; ++rep)
      models.push_back(build(substream_seed(
          seed, kPopulationStream + 1 + static_cast<std::uint64_t>(rep))));
  }
  return models;
}

std::vector<PolicyKind> ExperimentConfig::policy_kinds() const {
  std::vector<PolicyKind> kinds;
  kinds.reserve(policies.size());
  for (const auto& name : policies) kinds.push_back(parse_policy_kind(name));
  return kinds;
}

MonteCarloPlan ExperimentConfig::make_plan(int threads) const {
  MonteCarloPlan plan;
  plan.costs = make_costs();
  plan.policy = policy;
  plan.policies = policy_kinds();
  plan.horizon = horizon;
  plan.reps = reps;
  plan.master_seed = seed;
  plan.threads = threads;
  plan.keep_traces = trace_reps;
  return plan;
}

int resolve_threads() {
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (const char* env = std::getenv("DRLAB_THREADS")) {
    const std::string text(env);
    std::size_t used = 0;
    int cap = 0;
    try {
      cap = std::stoi(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size() || cap < 1)
      throw std::invalid_argument("DRLAB_THREADS must be a positive integer");
    threads = std::min(threads, cap);
  }
  return threads;
}

namespace {

std::string sig12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

}  // namespace

std::string make_manifest(const ExperimentConfig& config,
                          const DemandModel& model) {
  const auto costs = config.make_costs();
  const double c_bar = costs.upper_bound();
  const double eps_lo = model.shock.support_lo();
  const double eps_hi = model.shock.support_hi();
  const double p_bar = price_bound(model.box, c_bar, eps_lo, eps_hi);
  const double q_true = model.shock.quantile(config.policy.alpha);
  const double b_top = model.box.b_hi + eps_hi;
  const double kappa1 =
      std::sqrt(model.box.a_lo * model.box.a_lo + b_top * b_top) /
      (2.0 * model.box.a_lo * model.box.a_lo);
  const double kappa2 = 1.0 / (2.0 * model.box.a_lo);
  const double kappa3 = kappa1 + kappa2 * std::hypot(1.0, p_bar);

  char stamp[32] = "unknown";
  const std::time_t now = std::time(nullptr);
  if (std::tm tm{}; gmtime_r(&now, &tm) != nullptr)
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm);

  char digest_hex[32];
  std::snprintf(digest_hex, sizeof(digest_hex), "%016llx",
                static_cast<unsigned long long>(config.digest()));

  std::string out;
  out += "drlab_version = ";
  out += kVersion;
  out += '\n';
  out += "config_digest = ";
  out += digest_hex;
  out += '\n';
  out += "created_utc = ";
  out += stamp;
  out += '\n';
  out += "# config\n";
  out += config.canonical();
  out += "# derived\n";
  out += "theta_a = " + sig12(model.theta.a) + '\n';
  out += "theta_b = " + sig12(model.theta.b) + '\n';
  out += "c_bar = " + sig12(c_bar) + '\n';
  out += "eps_lo = " + sig12(eps_lo) + '\n';
  out += "eps_hi = " + sig12(eps_hi) + '\n';
  out += "p_bar = " + sig12(p_bar) + '\n';
  out += "q_true = " + sig12(q_true) + '\n';
  out += "q_true_normal_approx = " +
         sig12(model.shock.normal_approx_quantile(config.policy.alpha)) + '\n';
  out += "kappa1 = " + sig12(kappa1) + '\n';
  out += "kappa2 = " + sig12(kappa2) + '\n';
  out += "kappa3 = " + sig12(kappa3) + '\n';
  if (const auto lip = model.shock.bilipschitz_constant()) {
    out += "bilipschitz = " + sig12(*lip) + '\n';
    out += "mu1 = " + sig12(2.0 / (*lip * *lip * std::log(2.0))) + '\n';
  }
  return out;
}

}  // namespace drlab
