#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "drlab/demand.hpp"
#include "drlab/policy.hpp"
#include "drlab/stats.hpp"

namespace drlab {

struct TraceMeta {
  PolicyKind kind = PolicyKind::kOracle;
  PolicyConfig policy;
  DemandParams theta_true;
  ParamBox box;
  double q_true = 0.0;
  double c_bar = 0.0;
  double eps_lo = 0.0;
  double eps_hi = 0.0;
  double p_bar = 0.0;
  std::uint64_t seed = 0;
  std::int64_t clamp_count = 0;
  std::int64_t p_star_clamp_count = 0;
};

// Per-period record of one episode. Columns are parallel vectors indexed by
// t - 1. Estimate columns hold NaN until the first refresh and carry the
// latest value in between refreshes.
struct EpisodeTrace {
  TraceMeta meta;
  std::vector<double> cost;
  std::vector<double> price;
  std::vector<double> price_star;
  std::vector<double> demand;
  std::vector<double> shock;
  std::vector<double> a_hat;
  std::vector<double> b_hat;
  std::vector<double> q_hat;
  std::vector<double> q_hat_price;     // price paired with the quantile pick
  std::vector<double> info_lmin;       // smallest information eigenvalue
  std::vector<double> dispersion;      // J_t
  std::vector<double> lower_bound;     // L_t dither floor
  std::vector<double> shock_quantile;  // empirical quantile of true shocks
  std::vector<std::uint8_t> clamped;
  std::vector<std::uint8_t> refreshed;

  std::int64_t horizon() const { return static_cast<std::int64_t>(cost.size()); }
};

// Runs one episode of `horizon` periods. The shock stream depends only on
// the seed and the model, never on the policy, so runs that share a seed
// face identical shocks.
EpisodeTrace run_episode(const DemandModel& model, const CostSequence& costs,
                         PolicyKind kind, const PolicyConfig& config,
                         std::int64_t horizon, std::uint64_t seed);

// Cumulative regret a * sum_{k<=t} (p_k - p*_k)^2 for every t.
struct RegretSeries {
  std::vector<double> delta;
};

RegretSeries realized_regret(const EpisodeTrace& trace);

// Largest relative gap between the price-space regret and the summed
// revenue gaps. The two agree identically whenever the oracle price is
// interior to [0, c_t].
double regret_identity_gap(const EpisodeTrace& trace);

// Outcome of sweeping one exact inequality across a trace. slack is the
// signed margin by which a period misses the inequality, so slack beyond
// the tolerance 1e-9 * (1 + |bound|) is a violation; max_slack keeps the
// worst period seen.
struct BoundCheck {
  std::string name;
  std::int64_t periods = 0;
  std::int64_t violations = 0;
  double max_slack = 0.0;

  void absorb(const BoundCheck& other);
};

// lambda_min(info matrix) >= L_t / (1 + p_bar^2) at every period.
BoundCheck check_info_lower_bound(const EpisodeTrace& trace);

// Estimated-quantile error chained through the raw-shock quantile error,
// at refresh periods.
BoundCheck check_quantile_chain(const EpisodeTrace& trace);

// One-period-ahead price error against the kappa-weighted estimate errors,
// at even periods whose preceding odd period refreshed.
BoundCheck check_price_error_bound(const EpisodeTrace& trace);

// Tail-probability table for the empirical shock quantile: at each (t,
// gamma) cell, the share of replications with |quantile estimate - truth|
// > gamma, against the 2 exp(-mu1 gamma^2 t) tail bound. Requires a law
// with a known bi-Lipschitz constant.
struct ConcentrationCell {
  std::int64_t t = 0;
  double gamma = 0.0;
  double empirical = 0.0;
  double bound = 0.0;
  double ci3 = 0.0;  // three binomial standard errors
  std::int64_t reps = 0;
  bool pass = false;
};

std::vector<ConcentrationCell> quantile_concentration_experiment(
    const ShockDistribution& dist, double alpha,
    std::span<const std::int64_t> t_grid, std::span<const double> gamma_grid,
    std::int64_t reps, std::uint64_t seed);

struct MonteCarloPlan {
  CostSequence costs = CostSequence::constant(0.0);
  PolicyConfig policy;
  std::vector<PolicyKind> policies;
  std::int64_t horizon = 10'000;
  std::int64_t reps = 50;
  std::uint64_t master_seed = 0;
  int threads = 1;
  std::int64_t keep_traces = 1;  // retain full traces for this many reps
};

// Replication averages for one policy. Per-period vectors are indexed by
// t - 1; estimate-error columns are NaN before the first refresh.
struct PolicySummary {
  PolicyKind kind = PolicyKind::kOracle;
  std::int64_t reps = 0;
  std::vector<double> delta_mean;
  std::vector<double> delta_ci95;
  std::vector<double> price_mse;
  std::vector<double> theta_mse;
  std::vector<double> q_mse;
  std::vector<double> a_abs_err;
  std::vector<double> b_abs_err;
  std::vector<double> q_abs_err;
  std::int64_t clamp_count = 0;
  double regret_identity_max_gap = 0.0;
  BoundCheck info_bound;
  BoundCheck quantile_chain;
  BoundCheck price_error;
  std::vector<EpisodeTrace> traces;  // first keep_traces replications
};

struct MonteCarloSummary {
  std::vector<PolicySummary> policies;
  double q_true = 0.0;
  double p_bar = 0.0;
};

// Runs reps independent episodes per requested policy. Replication k draws
// its shocks from substream k of the master seed, shared across policies.
// models holds either one model used throughout or one model per
// replication. Results are aggregated in replication order regardless of
// thread count.
MonteCarloSummary run_monte_carlo(const std::vector<DemandModel>& models,
                                  const MonteCarloPlan& plan);

// Least-squares slope of log(series) on log(t) over integer t in
// [t_lo, t_hi]. Throws on an empty window or nonpositive values.
LineFit loglog_slope(std::span<const double> series, std::int64_t t_lo,
                     std::int64_t t_hi);

struct DecayCheck {
  LineFit fit;
  double max_slope = 0.0;
  bool pass = false;
};

// Fits the decay exponent of a mean-squared-error series and compares it
// against a ceiling.
DecayCheck mse_decay_check(std::span<const double> series, std::int64_t t_lo,
                           std::int64_t t_hi, double max_slope);

}  // namespace drlab
