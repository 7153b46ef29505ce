#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drlab/demand.hpp"
#include "drlab/harness.hpp"
#include "drlab/policy.hpp"

namespace drlab {

inline constexpr const char* kVersion = "1.0.0";

// Flat `key = value` experiment description with `#` comments. Defaults
// reproduce the bundled case study, so an empty file is a valid config.
struct ExperimentConfig {
  // model.*
  std::string model_kind = "population";  // population | direct
  PopulationSpec population;
  double direct_a = 120.0;
  double direct_b = 10.0;
  double direct_box_a_lo = 40.0;
  double direct_box_a_hi = 200.0;
  double direct_box_b_hi = 100.0;
  std::string direct_shock = "uniform";  // uniform | truncnormal

  // policy.*
  PolicyConfig policy;

  // cost.*
  std::string cost_kind = "constant";  // constant | alternating | sequence
  double cost_wholesale = 1.67;
  double cost_retail = 0.17;
  double cost_center = 1.5;
  double cost_sigma = 0.2;
  std::vector<double> cost_values;

  // run.*
  std::int64_t horizon = 10'000;
  std::int64_t reps = 50;
  std::uint64_t seed = 2024;
  std::string out_dir = "out";
  std::vector<std::string> policies = {"oracle", "myopic", "perturbed"};
  std::int64_t trace_reps = 1;  // how many replications get trace files

  // mc.*
  std::int64_t quantile_samples = 10'000'000;
  bool population_redraw = false;

  bool operator==(const ExperimentConfig&) const = default;

  void validate() const;

  // Sorted `key = value` dump of every field; optional fields appear only
  // when set. Parsing it back yields an equal config.
  std::string canonical() const;

  // FNV-1a over canonical(), so reordering the config file on disk does
  // not change the digest.
  std::uint64_t digest() const;

  CostSequence make_costs() const;
  // One model in fixed-population and direct modes, one per replication
  // when mc.population_redraw is set. All population models share one
  // aggregate shock law (and thus one quantile table).
  std::vector<DemandModel> make_models() const;
  std::vector<PolicyKind> policy_kinds() const;
  MonteCarloPlan make_plan(int threads) const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Worker count: hardware concurrency, capped by the DRLAB_THREADS
// environment variable when set.
int resolve_threads();

// Resolved config, seed, code version, timestamp, and the derived
// constants bound checks rely on, all as `key = value` text.
std::string make_manifest(const ExperimentConfig& config,
                          const DemandModel& model);

}  // namespace drlab
