#include "drlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace drlab {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double check_tol(double rhs) { return 1e-9 * (1.0 + std::fabs(rhs)); }

// L_t: the deterministic floor the dither schedule puts under the price
// dispersion, (1/8) (rho^2 floor(t/2)^(1-2r) + sum of squared within-pair
// cost changes).
double dither_floor(std::int64_t t, double rho, double r, double pair_sum) {
  const double halves = static_cast<double>(t / 2);
  return 0.125 * (rho * rho * std::pow(halves, 1.0 - 2.0 * r) + pair_sum);
}

}  // namespace

EpisodeTrace run_episode(const DemandModel& model, const CostSequence& costs,
                         PolicyKind kind, const PolicyConfig& config,
                         std::int64_t horizon, std::uint64_t seed) {
  if (horizon < 3)
    throw std::invalid_argument("episode: horizon T >= 3 required");
  config.validate();
  const double q_true = model.shock.quantile(config.alpha);
  const double c_bar = costs.upper_bound();
  const double eps_lo = model.shock.support_lo();
  const double eps_hi = model.shock.support_hi();
  const double p_bar = price_bound(model.box, c_bar, eps_lo, eps_hi);

  EpisodeTrace tr;
  tr.meta.kind = kind;
  tr.meta.policy = config;
  tr.meta.theta_true = model.theta;
  tr.meta.box = model.box;
  tr.meta.q_true = q_true;
  tr.meta.c_bar = c_bar;
  tr.meta.eps_lo = eps_lo;
  tr.meta.eps_hi = eps_hi;
  tr.meta.p_bar = p_bar;
  tr.meta.seed = seed;
  const auto n = static_cast<std::size_t>(horizon);
  for (auto* col : {&tr.cost, &tr.price, &tr.price_star, &tr.demand, &tr.shock,
                    &tr.a_hat, &tr.b_hat, &tr.q_hat, &tr.q_hat_price,
                    &tr.info_lmin, &tr.dispersion, &tr.lower_bound,
                    &tr.shock_quantile})
    col->reserve(n);
  tr.clamped.reserve(n);
  tr.refreshed.reserve(n);

  PricingPolicy policy(kind, config, model.box, c_bar, model.theta, q_true);
  EstimatorState est;
  QuantileTracker shock_q(config.alpha);
  Rng rng(seed);

  double pair_sum = 0.0;
  double c_prev = 0.0;
  for (std::int64_t t = 1; t <= horizon; ++t) {
    const double c = costs.cost_at(t);
    const double p = policy.next_price(t, c, est);
    const double eps = model.shock.sample(rng);
    const double demand = lambda(p, model.theta) + eps;
    est.observe(p, demand);
    policy.end_period(t, est);
    shock_q.push(eps);

    if (t % 2 == 0) {
      const double dc = c - c_prev;
      pair_sum += dc * dc;
    }
    const double vertex = oracle_price(c, model.theta, q_true, ClampMode::kNone);
    const double p_star = std::clamp(vertex, 0.0, c);
    if (p_star != vertex) ++tr.meta.p_star_clamp_count;

    tr.cost.push_back(c);
    tr.price.push_back(p);
    tr.price_star.push_back(p_star);
    tr.demand.push_back(demand);
    tr.shock.push_back(eps);
    const auto& th = est.theta_hat();
    const auto& qh = est.quantile_hat();
    tr.a_hat.push_back(th ? th->a : kNan);
    tr.b_hat.push_back(th ? th->b : kNan);
    tr.q_hat.push_back(qh ? qh->value : kNan);
    tr.q_hat_price.push_back(qh ? qh->paired_price : kNan);
    tr.info_lmin.push_back(est.info_min_eigenvalue());
    tr.dispersion.push_back(est.price_dispersion());
    tr.lower_bound.push_back(dither_floor(t, config.rho, config.r, pair_sum));
    tr.shock_quantile.push_back(shock_q.value());
    tr.clamped.push_back(policy.last_clamped() ? 1 : 0);
    tr.refreshed.push_back(est.estimate_period() == t ? 1 : 0);
    c_prev = c;
  }
  tr.meta.clamp_count = policy.clamp_count();
  return tr;
}

RegretSeries realized_regret(const EpisodeTrace& trace) {
  RegretSeries series;
  series.delta.reserve(trace.cost.size());
  const double a = trace.meta.theta_true.a;
  double cum = 0.0;
  for (std::size_t k = 0; k < trace.cost.size(); ++k) {
    const double e = trace.price[k] - trace.price_star[k];
    cum += a * e * e;
    series.delta.push_back(cum);
  }
  return series;
}

double regret_identity_gap(const EpisodeTrace& trace) {
  const auto& th = trace.meta.theta_true;
  const double q = trace.meta.q_true;
  double cum_sq = 0.0;
  double cum_rev = 0.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < trace.cost.size(); ++k) {
    const double e = trace.price[k] - trace.price_star[k];
    cum_sq += th.a * e * e;
    cum_rev += risk_revenue(trace.price_star[k], trace.cost[k], th, q) -
               risk_revenue(trace.price[k], trace.cost[k], th, q);
    const double gap = std::fabs(cum_sq - cum_rev) / std::max(1.0, cum_sq);
    worst = std::max(worst, gap);
  }
  return worst;
}

void BoundCheck::absorb(const BoundCheck& other) {
  periods += other.periods;
  violations += other.violations;
  max_slack = std::max(max_slack, other.max_slack);
}

BoundCheck check_info_lower_bound(const EpisodeTrace& trace) {
  BoundCheck check;
  check.name = "info_eigenvalue_floor";
  check.max_slack = -std::numeric_limits<double>::infinity();
  if (trace.meta.kind != PolicyKind::kPerturbedMyopic) {
    check.max_slack = 0.0;
    return check;
  }
  const double denom = 1.0 + trace.meta.p_bar * trace.meta.p_bar;
  for (std::size_t k = 0; k < trace.cost.size(); ++k) {
    const double rhs = trace.lower_bound[k] / denom;
    const double slack = rhs - trace.info_lmin[k];
    ++check.periods;
    check.max_slack = std::max(check.max_slack, slack);
    if (slack > check_tol(rhs)) ++check.violations;
  }
  return check;
}

BoundCheck check_quantile_chain(const EpisodeTrace& trace) {
  BoundCheck check;
  check.name = "quantile_error_chain";
  check.max_slack = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t k = 0; k < trace.cost.size(); ++k) {
    if (!trace.refreshed[k]) continue;
    const DemandParams theta_hat{trace.a_hat[k], trace.b_hat[k]};
    const QuantileEstimate q_hat{trace.q_hat[k], 0, trace.q_hat_price[k]};
    const auto terms =
        quantile_error_chain(theta_hat, trace.meta.theta_true, q_hat,
                             trace.meta.q_true, trace.shock_quantile[k]);
    const double rhs = terms.term1 + terms.term2;
    const double slack = terms.lhs - rhs;
    ++check.periods;
    any = true;
    check.max_slack = std::max(check.max_slack, slack);
    if (slack > check_tol(rhs)) ++check.violations;
  }
  if (!any) check.max_slack = 0.0;
  return check;
}

BoundCheck check_price_error_bound(const EpisodeTrace& trace) {
  BoundCheck check;
  check.name = "price_error_bound";
  check.max_slack = -std::numeric_limits<double>::infinity();
  if (trace.meta.kind != PolicyKind::kPerturbedMyopic) {
    check.max_slack = 0.0;
    return check;
  }
  const auto& box = trace.meta.box;
  const double b_top = box.b_hi + trace.meta.eps_hi;
  const double kappa1 =
      std::sqrt(box.a_lo * box.a_lo + b_top * b_top) / (2.0 * box.a_lo * box.a_lo);
  const double kappa2 = 1.0 / (2.0 * box.a_lo);
  const double kappa3 = kappa1 + kappa2 * std::hypot(1.0, trace.meta.p_bar);
  const double rho = trace.meta.policy.rho;
  const double r = trace.meta.policy.r;

  const auto horizon = trace.horizon();
  bool any = false;
  for (std::int64_t t = 4; t + 1 <= horizon; t += 2) {
    const auto prev = static_cast<std::size_t>(t - 2);  // period t - 1
    const auto next = static_cast<std::size_t>(t);      // period t + 1
    if (!trace.refreshed[prev]) continue;
    const DemandParams theta_hat{trace.a_hat[prev], trace.b_hat[prev]};
    const double lhs = std::fabs(trace.price[next] - trace.price_star[next]);
    const double rhs =
        kappa3 * theta_distance(theta_hat, trace.meta.theta_true) +
        kappa2 * std::fabs(trace.shock_quantile[prev] - trace.meta.q_true) +
        rho * std::pow(static_cast<double>(t + 1), -r);
    const double slack = lhs - rhs;
    ++check.periods;
    any = true;
    check.max_slack = std::max(check.max_slack, slack);
    if (slack > check_tol(rhs)) ++check.violations;
  }
  if (!any) check.max_slack = 0.0;
  return check;
}

std::vector<ConcentrationCell> quantile_concentration_experiment(
    const ShockDistribution& dist, double alpha,
    std::span<const std::int64_t> t_grid, std::span<const double> gamma_grid,
    std::int64_t reps, std::uint64_t seed) {
  const auto lip = dist.bilipschitz_constant();
  if (!lip)
    throw std::invalid_argument(
        "concentration experiment: law must expose a bi-Lipschitz constant");
  if (reps < 1)
    throw std::invalid_argument("concentration experiment: reps >= 1 required");
  const double mu1 = 2.0 / (*lip * *lip * std::log(2.0));
  const double q_true = dist.quantile(alpha);

  std::vector<ConcentrationCell> cells;
  Rng rng(seed);
  std::vector<double> buf;
  std::vector<double> errors(static_cast<std::size_t>(reps));
  for (const auto t : t_grid) {
    if (t < 1)
      throw std::invalid_argument("concentration experiment: t >= 1 required");
    buf.resize(static_cast<std::size_t>(t));
    const auto i = quantile_index(t, alpha);
    for (auto& err : errors) {
      for (auto& x : buf) x = dist.sample(rng);
      std::nth_element(buf.begin(), buf.begin() + (i - 1), buf.end());
      err = std::fabs(buf[static_cast<std::size_t>(i - 1)] - q_true);
    }
    for (const auto gamma : gamma_grid) {
      ConcentrationCell cell;
      cell.t = t;
      cell.gamma = gamma;
      cell.reps = reps;
      std::int64_t exceed = 0;
      for (const auto err : errors)
        if (err > gamma) ++exceed;
      cell.empirical =
          static_cast<double>(exceed) / static_cast<double>(reps);
      cell.bound = 2.0 * std::exp(-mu1 * gamma * gamma * static_cast<double>(t));
      cell.ci3 = 3.0 * std::sqrt(cell.empirical * (1.0 - cell.empirical) /
                                 static_cast<double>(reps));
      cell.pass = cell.empirical <= cell.bound + cell.ci3;
      cells.push_back(cell);
    }
  }
  return cells;
}

namespace {

struct PerRep {
  double a_true = 0.0;
  std::vector<double> price_sqerr;
  std::vector<double> a_abs;
  std::vector<double> b_abs;
  std::vector<double> q_abs;
  std::int64_t clamp_count = 0;
  double identity_gap = 0.0;
  BoundCheck info;
  BoundCheck chain;
  BoundCheck price;
  EpisodeTrace trace;
};

PerRep summarize_episode(EpisodeTrace trace, bool keep_trace) {
  PerRep rep;
  rep.a_true = trace.meta.theta_true.a;
  const auto n = trace.cost.size();
  rep.price_sqerr.resize(n);
  rep.a_abs.resize(n);
  rep.b_abs.resize(n);
  rep.q_abs.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double e = trace.price[k] - trace.price_star[k];
    rep.price_sqerr[k] = e * e;
    rep.a_abs[k] = std::fabs(trace.a_hat[k] - trace.meta.theta_true.a);
    rep.b_abs[k] = std::fabs(trace.b_hat[k] - trace.meta.theta_true.b);
    rep.q_abs[k] = std::fabs(trace.q_hat[k] - trace.meta.q_true);
  }
  rep.clamp_count = trace.meta.clamp_count;
  rep.identity_gap = regret_identity_gap(trace);
  rep.info = check_info_lower_bound(trace);
  rep.chain = check_quantile_chain(trace);
  rep.price = check_price_error_bound(trace);
  if (keep_trace) rep.trace = std::move(trace);
  return rep;
}

}  // namespace

MonteCarloSummary run_monte_carlo(const std::vector<DemandModel>& models,
                                  const MonteCarloPlan& plan) {
  if (models.empty())
    throw std::invalid_argument("monte carlo: at least one model required");
  if (models.size() != 1 &&
      models.size() != static_cast<std::size_t>(plan.reps))
    throw std::invalid_argument(
        "monte carlo: model count must be 1 or match reps");
  if (plan.reps < 1)
    throw std::invalid_argument("monte carlo: reps >= 1 required");
  if (plan.policies.empty())
    throw std::invalid_argument("monte carlo: no policies requested");
  plan.policy.validate();

  const auto model_for = [&](std::int64_t rep) -> const DemandModel& {
    return models.size() == 1 ? models[0]
                              : models[static_cast<std::size_t>(rep)];
  };
  // Build the quantile table (and any lazy state) before the workers fork.
  const double q_true = models[0].shock.quantile(plan.policy.alpha);

  const auto n_policies = plan.policies.size();
  const auto total = n_policies * static_cast<std::size_t>(plan.reps);
  std::vector<PerRep> slots(total);
  std::atomic<std::size_t> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    for (;;) {
      const auto job = cursor.fetch_add(1);
      if (job >= total) return;
      try {
        const auto pi = job / static_cast<std::size_t>(plan.reps);
        const auto rep =
            static_cast<std::int64_t>(job % static_cast<std::size_t>(plan.reps));
        const auto seed = substream_seed(plan.master_seed,
                                         static_cast<std::uint64_t>(rep));
        auto trace = run_episode(model_for(rep), plan.costs,
                                 plan.policies[pi], plan.policy, plan.horizon,
                                 seed);
        slots[job] = summarize_episode(std::move(trace), rep < plan.keep_traces);
      } catch (...) {
        std::lock_guard<std::mutex> hold(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const int threads = std::max(
      1, std::min<int>(plan.threads, static_cast<int>(total)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  MonteCarloSummary summary;
  summary.q_true = q_true;
  summary.p_bar =
      price_bound(models[0].box, plan.costs.upper_bound(),
                  models[0].shock.support_lo(), models[0].shock.support_hi());

  const auto horizon = static_cast<std::size_t>(plan.horizon);
  for (std::size_t pi = 0; pi < n_policies; ++pi) {
    PolicySummary ps;
    ps.kind = plan.policies[pi];
    ps.reps = plan.reps;
    ps.delta_mean.assign(horizon, 0.0);
    ps.delta_ci95.assign(horizon, 0.0);
    ps.price_mse.assign(horizon, 0.0);
    ps.theta_mse.assign(horizon, 0.0);
    ps.q_mse.assign(horizon, 0.0);
    ps.a_abs_err.assign(horizon, 0.0);
    ps.b_abs_err.assign(horizon, 0.0);
    ps.q_abs_err.assign(horizon, 0.0);
    std::vector<double> delta_m2(horizon, 0.0);
    ps.info_bound.name = "info_eigenvalue_floor";
    ps.quantile_chain.name = "quantile_error_chain";
    ps.price_error.name = "price_error_bound";
    ps.info_bound.max_slack = -std::numeric_limits<double>::infinity();
    ps.quantile_chain.max_slack = -std::numeric_limits<double>::infinity();
    ps.price_error.max_slack = -std::numeric_limits<double>::infinity();

    for (std::int64_t rep = 0; rep < plan.reps; ++rep) {
      auto& slot = slots[pi * static_cast<std::size_t>(plan.reps) +
                         static_cast<std::size_t>(rep)];
      const double count = static_cast<double>(rep + 1);
      double cum = 0.0;
      for (std::size_t k = 0; k < horizon; ++k) {
        cum += slot.a_true * slot.price_sqerr[k];
        const double d = cum - ps.delta_mean[k];
        ps.delta_mean[k] += d / count;
        delta_m2[k] += d * (cum - ps.delta_mean[k]);
        ps.price_mse[k] += (slot.price_sqerr[k] - ps.price_mse[k]) / count;
        const double th_sq =
            slot.a_abs[k] * slot.a_abs[k] + slot.b_abs[k] * slot.b_abs[k];
        ps.theta_mse[k] += (th_sq - ps.theta_mse[k]) / count;
        ps.q_mse[k] += (slot.q_abs[k] * slot.q_abs[k] - ps.q_mse[k]) / count;
        ps.a_abs_err[k] += (slot.a_abs[k] - ps.a_abs_err[k]) / count;
        ps.b_abs_err[k] += (slot.b_abs[k] - ps.b_abs_err[k]) / count;
        ps.q_abs_err[k] += (slot.q_abs[k] - ps.q_abs_err[k]) / count;
      }
      ps.clamp_count += slot.clamp_count;
      ps.regret_identity_max_gap =
          std::max(ps.regret_identity_max_gap, slot.identity_gap);
      ps.info_bound.absorb(slot.info);
      ps.quantile_chain.absorb(slot.chain);
      ps.price_error.absorb(slot.price);
      if (rep < plan.keep_traces) ps.traces.push_back(std::move(slot.trace));
    }
    if (plan.reps > 1) {
      for (std::size_t k = 0; k < horizon; ++k)
        ps.delta_ci95[k] = 1.96 * std::sqrt(delta_m2[k] /
                                            static_cast<double>(plan.reps - 1) /
                                            static_cast<double>(plan.reps));
    }
    summary.policies.push_back(std::move(ps));
  }
  return summary;
}

LineFit loglog_slope(std::span<const double> series, std::int64_t t_lo,
                     std::int64_t t_hi) {
  if (t_lo < 1 || t_hi > static_cast<std::int64_t>(series.size()) ||
      t_lo >= t_hi)
    throw std::invalid_argument("slope: window empty or out of range");
  std::vector<double> xs, ys;
  xs.reserve(static_cast<std::size_t>(t_hi - t_lo + 1));
  ys.reserve(xs.capacity());
  for (std::int64_t t = t_lo; t <= t_hi; ++t) {
    const double v = series[static_cast<std::size_t>(t - 1)];
    if (!(v > 0.0))
      throw std::invalid_argument("slope: nonpositive value in window");
    xs.push_back(std::log(static_cast<double>(t)));
    ys.push_back(std::log(v));
  }
  return fit_line(xs, ys);
}

DecayCheck mse_decay_check(std::span<const double> series, std::int64_t t_lo,
                           std::int64_t t_hi, double max_slope) {
  DecayCheck check;
  check.fit = loglog_slope(series, t_lo, t_hi);
  check.max_slope = max_slope;
  check.pass = check.fit.slope <= max_slope;
  return check;
}

}  // namespace drlab
