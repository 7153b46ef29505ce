#include "drlab/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace drlab {

void PolicyConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("policy: alpha out of (0,1)");
  if (!(rho >= 0.0)) throw std::invalid_argument("policy: rho >= 0 required");
  if (!(r >= 0.0 && r < 0.5))
    throw std::invalid_argument("policy: r out of [0, 1/2)");
  if (warm_price1 && !(*warm_price1 >= 0.0))
    throw std::invalid_argument("policy: warm-start price must be >= 0");
  if (warm_price2 && !(*warm_price2 >= 0.0))
    throw std::invalid_argument("policy: warm-start price must be >= 0");
}

double risk_revenue(double p, double c, const DemandParams& theta, double q) {
  return (c - p) * (lambda(p, theta) + q);
}

double oracle_price(double c, const DemandParams& theta, double q,
                    ClampMode clamp) {
  const double vertex = c / 2.0 - (theta.b + q) / (2.0 * theta.a);
  if (clamp == ClampMode::kInterval) return std::clamp(vertex, 0.0, c);
  return vertex;
}

double myopic_price(double c_next, const DemandParams& theta_hat,
                    double q_hat) {
  return c_next / 2.0 - (theta_hat.b + q_hat) / (2.0 * theta_hat.a);
}

double perturbation_delta(std::int64_t t, double c_t, double c_prev, double r) {
  if (t < 1) throw std::invalid_argument("perturbation: period index starts at 1");
  const double sgn = c_t >= c_prev ? 1.0 : -1.0;
  return sgn * std::pow(static_cast<double>(t), -r);
}

PricingPolicy::PricingPolicy(PolicyKind kind, PolicyConfig config,
                             ParamBox box, double c_bar,
                             std::optional<DemandParams> theta_true,
                             std::optional<double> q_true)
    : kind_(kind),
      config_(config),
      box_(box),
      c_bar_(c_bar),
      theta_true_(theta_true),
      q_true_(q_true) {
  config_.validate();
  box_.validate();
  if (kind_ == PolicyKind::kOracle && (!theta_true_ || !q_true_))
    throw std::invalid_argument("oracle policy needs the true parameters");
}

double PricingPolicy::clamp_price(double raw, double c) {
  double posted = raw;
  if (config_.clamp == ClampMode::kInterval || kind_ == PolicyKind::kOracle)
    posted = std::clamp(raw, 0.0, c);
  last_clamped_ = posted != raw;
  if (last_clamped_) ++clamp_count_;
  return posted;
}

double PricingPolicy::next_price(std::int64_t t_next, double c_next,
                                 const EstimatorState& est) {
  if (t_next != last_period_ + 1)
    throw std::logic_error("policy: periods must be visited in order");
  double raw;
  if (kind_ == PolicyKind::kOracle) {
    raw = oracle_price(c_next, *theta_true_, *q_true_, ClampMode::kNone);
  } else if (t_next == 1) {
    raw = config_.warm_price1.value_or(c_next / 2.0);
    anchor_price_ = raw;
  } else if (t_next == 2) {
    // Separate the two warm-start prices so the first fit is well posed.
    // The dither coefficient covers that whenever it is active; with
    // rho = 0 a cost change does the job, and failing both we fall back
    // to a small fraction of the cost ceiling.
    double coeff = config_.rho;
    if (config_.rho == 0.0 && c_next == last_cost_) coeff = 0.05 * c_bar_;
    raw = config_.warm_price2.value_or(
        c_next / 2.0 + coeff * std::pow(2.0, -config_.r));
    anchor_price_ = raw;
  } else {
    const std::int64_t t = t_next - 1;
    if (kind_ == PolicyKind::kMyopic || t % 2 == 1) {
      if (!est.theta_hat() || !est.quantile_hat() ||
          est.estimate_period() != t)
        throw std::runtime_error("policy: no estimate for period " +
                                 std::to_string(t_next));
      raw = myopic_price(c_next, *est.theta_hat(), est.quantile_hat()->value);
      anchor_price_ = raw;
    } else {
      raw = anchor_price_ + 0.5 * (c_next - last_cost_) +
            config_.rho *
                perturbation_delta(t_next, c_next, last_cost_, config_.r);
    }
  }
  last_cost_ = c_next;
  last_period_ = t_next;
  return clamp_price(raw, c_next);
}

void PricingPolicy::end_period(std::int64_t t, EstimatorState& est) {
  if (t != last_period_)
    throw std::logic_error("policy: end_period out of step with next_price");
  const bool refresh_now =
      (kind_ == PolicyKind::kMyopic && t >= 2) ||
      (kind_ == PolicyKind::kPerturbedMyopic && t >= 3 && t % 2 == 1);
  if (refresh_now && !est.refresh(box_, config_.alpha))
    throw std::runtime_error("policy: estimator unavailable at period " +
                             std::to_string(t));
}

}  // namespace drlab
