#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drlab/config.hpp"
#include "drlab/csv.hpp"
#include "drlab/policy_names.hpp"

namespace {

namespace fs = std::filesystem;
using namespace drlab;

constexpr std::uint64_t kConcentrationStream = 1ULL << 33;

struct Overrides {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::int64_t reps = 0;
  std::int64_t horizon = 0;
  std::string policies;
  std::int64_t trace_reps = -1;
  bool has_out = false, has_seed = false, has_reps = false, has_horizon = false,
       has_policies = false, has_traces = false;
};

void add_common_options(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--config", ov.config_path, "config file (defaults apply if omitted)");
  cmd->add_option("--out", ov.out_dir, "output directory")
      ->each([&](const std::string&) { ov.has_out = true; });
  cmd->add_option("--seed", ov.seed, "master seed")
      ->each([&](const std::string&) { ov.has_seed = true; });
  cmd->add_option("--reps", ov.reps, "replication count")
      ->each([&](const std::string&) { ov.has_reps = true; });
  cmd->add_option("--horizon", ov.horizon, "episode length T")
      ->each([&](const std::string&) { ov.has_horizon = true; });
  cmd->add_option("--policies", ov.policies,
                  "comma list out of oracle,myopic,perturbed")
      ->each([&](const std::string&) { ov.has_policies = true; });
  cmd->add_option("--traces", ov.trace_reps,
                  "replications whose traces are written")
      ->each([&](const std::string&) { ov.has_traces = true; });
}

ExperimentConfig resolve_config(const Overrides& ov) {
  ExperimentConfig cfg = ov.config_path.empty() ? ExperimentConfig{}
                                                : load_config(ov.config_path);
  if (ov.has_out) cfg.out_dir = ov.out_dir;
  if (ov.has_seed) cfg.seed = ov.seed;
  if (ov.has_reps) cfg.reps = ov.reps;
  if (ov.has_horizon) cfg.horizon = ov.horizon;
  if (ov.has_traces) cfg.trace_reps = ov.trace_reps;
  if (ov.has_policies) {
    cfg.policies.clear();
    std::string item;
    std::istringstream in(ov.policies);
    while (std::getline(in, item, ','))
      if (!item.empty()) cfg.policies.push_back(item);
  }
  if (cfg.trace_reps > cfg.reps) cfg.trace_reps = cfg.reps;
  cfg.validate();
  return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
}

void print_header(const ExperimentConfig& cfg, const DemandModel& model,
                  int threads) {
  std::printf("drlab %s  config digest %016llx\n", kVersion,
              static_cast<unsigned long long>(cfg.digest()));
  const auto costs = cfg.make_costs();
  const double p_bar = price_bound(model.box, costs.upper_bound(),
                                   model.shock.support_lo(),
                                   model.shock.support_hi());
  const double q_true = model.shock.quantile(cfg.policy.alpha);
  std::printf("model: a=%.6g b=%.6g  q_true=%.6g (normal approx %.6g)  p_bar=%.6g\n",
              model.theta.a, model.theta.b, q_true,
              model.shock.normal_approx_quantile(cfg.policy.alpha), p_bar);
  std::string names;
  for (const auto& p : cfg.policies) {
    if (!names.empty()) names += ',';
    names += p;
  }
  std::printf("run: T=%lld reps=%lld seed=%llu policies=%s threads=%d\n",
              static_cast<long long>(cfg.horizon),
              static_cast<long long>(cfg.reps),
              static_cast<unsigned long long>(cfg.seed), names.c_str(),
              threads);
}

int cmd_run(const Overrides& ov) {
  const auto cfg = resolve_config(ov);
  const int threads = resolve_threads();
  const auto models = cfg.make_models();
  print_header(cfg, models[0], threads);

  const auto summary = run_monte_carlo(models, cfg.make_plan(threads));

  fs::create_directories(cfg.out_dir);
  const fs::path out(cfg.out_dir);
  for (const auto& ps : summary.policies) {
    const std::string name = policy_name(ps.kind);
    write_summary_csv(ps, (out / ("summary_" + name + ".csv")).string());
    for (std::size_t rep = 0; rep < ps.traces.size(); ++rep)
      write_trace_csv(ps.traces[rep],
                      (out / ("trace_" + name + "_" + std::to_string(rep) +
                              ".csv"))
                          .string());
    std::printf(
        "%s: Delta(T) mean %.6g  clamp-bound periods %lld  identity gap %.3g\n",
        name.c_str(), ps.delta_mean.back(),
        static_cast<long long>(ps.clamp_count), ps.regret_identity_max_gap);
  }
  write_regret_csv(summary, (out / "regret.csv").string());
  write_file(out / "manifest.txt", make_manifest(cfg, models[0]));
  std::printf("wrote %s\n", out.string().c_str());
  return 0;
}

int cmd_verify(const Overrides& ov) {
  const auto cfg = resolve_config(ov);
  const int threads = resolve_threads();
  const auto models = cfg.make_models();
  print_header(cfg, models[0], threads);

  const auto summary = run_monte_carlo(models, cfg.make_plan(threads));

  BoundCheck info{"info_eigenvalue_floor"};
  BoundCheck chain{"quantile_error_chain"};
  BoundCheck price{"price_error_bound"};
  info.max_slack = chain.max_slack = price.max_slack =
      -std::numeric_limits<double>::infinity();
  for (const auto& ps : summary.policies) {
    info.absorb(ps.info_bound);
    chain.absorb(ps.quantile_chain);
    price.absorb(ps.price_error);
  }

  // Tail-bound table on the canonical uniform law, where the bi-Lipschitz
  // constant is exactly 1.
  const auto uniform = ShockDistribution::uniform(-0.5, 0.5);
  const std::vector<std::int64_t> t_grid{4, 16, 64, 256};
  const std::vector<double> gamma_grid{0.05, 0.1, 0.2};
  const auto cells = quantile_concentration_experiment(
      uniform, cfg.policy.alpha, t_grid, gamma_grid, 10'000,
      substream_seed(cfg.seed, kConcentrationStream));

  fs::create_directories(cfg.out_dir);
  const fs::path out(cfg.out_dir);
  write_bounds_report_csv({info, chain, price}, cells,
                          (out / "bounds_report.csv").string());
  write_file(out / "manifest.txt", make_manifest(cfg, models[0]));

  bool exact_ok = true;
  for (const auto& check : {info, chain, price}) {
    std::printf("%s: %lld periods, %lld violations, max slack %.3g\n",
                check.name.c_str(), static_cast<long long>(check.periods),
                static_cast<long long>(check.violations), check.max_slack);
    if (check.violations > 0) exact_ok = false;
  }
  std::int64_t cell_fails = 0;
  for (const auto& cell : cells)
    if (!cell.pass) ++cell_fails;
  std::printf("quantile_concentration: %zu cells, %lld above bound+3se\n",
              cells.size(), static_cast<long long>(cell_fails));
  std::printf("verify: %s\n", exact_ok ? "PASS" : "FAIL");
  return exact_ok ? 0 : 1;
}

int cmd_slope(const std::string& input, std::int64_t t_lo, std::int64_t t_hi) {
  std::ifstream in(input, std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "cannot open %s\n", input.c_str());
    return 2;
  }
  std::string header;
  if (!std::getline(in, header)) {
    std::fprintf(stderr, "%s is empty\n", input.c_str());
    return 2;
  }
  std::vector<std::string> names;
  {
    std::istringstream hs(header);
    std::string col;
    while (std::getline(hs, col, ',')) names.push_back(col);
  }
  if (names.size() < 2 || names[0] != "t") {
    std::fprintf(stderr, "%s: expected a t column plus regret columns\n",
                 input.c_str());
    return 2;
  }
  std::vector<std::vector<double>> cols(names.size() - 1);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::size_t k = 0;
    while (std::getline(ls, cell, ',')) {
      if (k > 0 && k < names.size()) cols[k - 1].push_back(std::stod(cell));
      ++k;
    }
  }
  const auto horizon = static_cast<std::int64_t>(cols[0].size());
  if (t_hi <= 0) t_hi = horizon;
  if (t_lo <= 0) t_lo = std::max<std::int64_t>(1, horizon / 2);
  if (t_lo >= t_hi || t_hi > horizon) {
    std::fprintf(stderr, "slope window [%lld, %lld] empty or out of range\n",
                 static_cast<long long>(t_lo), static_cast<long long>(t_hi));
    return 2;
  }
  std::printf("window [%lld, %lld]\n", static_cast<long long>(t_lo),
              static_cast<long long>(t_hi));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    try {
      const auto fit = loglog_slope(cols[c], t_lo, t_hi);
      std::printf("%s: slope %.4f  stderr %.4f\n", names[c + 1].c_str(),
                  fit.slope, fit.slope_stderr);
    } catch (const std::exception&) {
      std::printf("%s: n/a (nonpositive values in window)\n",
                  names[c + 1].c_str());
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation lab for risk-sensitive demand-response pricing"};
  app.require_subcommand(1);

  Overrides run_ov, verify_ov;
  auto* run =
      app.add_subcommand("run", "simulate the configured policies and write "
                                "traces, summaries, and the run manifest");
  add_common_options(run, run_ov);
  auto* verify = app.add_subcommand(
      "verify", "sweep the exact inequality checks and the quantile "
                "concentration table; nonzero exit on exact violations");
  add_common_options(verify, verify_ov);

  std::string slope_input = "out/regret.csv";
  std::int64_t t_lo = 0, t_hi = 0;
  auto* slope = app.add_subcommand(
      "slope", "fit log-log growth rates of the regret columns");
  slope->add_option("--input", slope_input, "regret.csv produced by run");
  slope->add_option("--tlo", t_lo, "window start (default T/2)");
  slope->add_option("--thi", t_hi, "window end (default T)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_ov);
    if (verify->parsed()) return cmd_verify(verify_ov);
    if (slope->parsed()) return cmd_slope(slope_input, t_lo, t_hi);
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  }
  return 2;
}
