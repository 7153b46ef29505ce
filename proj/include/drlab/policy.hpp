#pragma once

#include <cstdint>
#include <optional>

#include "drlab/demand.hpp"
#include "drlab/estimation.hpp"

namespace drlab {

enum class PolicyKind { kOracle, kMyopic, kPerturbedMyopic };

enum class ClampMode { kNone, kInterval };

struct PolicyConfig {
  double alpha = 0.1;
  double rho = 0.19;
  double r = 0.25;  // perturbation decay exponent, in [0, 1/2)
  ClampMode clamp = ClampMode::kInterval;
  // Warm-start prices for the first two periods; defaults are c_1/2 and
  // c_2/2 plus a separation offset (see PricingPolicy::next_price).
  std::optional<double> warm_price1;
  std::optional<double> warm_price2;

  bool operator==(const PolicyConfig&) const = default;

  void validate() const;
};

// Revenue at price p under cost c when a (1 - alpha) service level is
// enforced through the alpha-quantile q of the shock.
double risk_revenue(double p, double c, const DemandParams& theta, double q);

// Maximizer of risk_revenue in p; the interval mode projects onto [0, c].
double oracle_price(double c, const DemandParams& theta, double q,
                    ClampMode clamp);

// Certainty-equivalent price: the oracle formula evaluated at estimates,
// unclamped.
double myopic_price(double c_next, const DemandParams& theta_hat,
                    double q_hat);

// Dither sign(c_t - c_prev) * t^(-r), with sign(0) = +1.
double perturbation_delta(std::int64_t t, double c_t, double c_prev, double r);

// Price schedule driver. One instance per episode:
//   - oracle posts the optimum from the true parameters every period
//   - myopic re-estimates after every observed period
//   - perturbed myopic re-estimates only after odd periods; after even
//     periods it reuses the stored anchor, shifted by half the cost change
//     plus the decaying dither
// The caller alternates next_price / observe / end_period.
class PricingPolicy {
 public:
  PricingPolicy(PolicyKind kind, PolicyConfig config, ParamBox box,
                double c_bar,
                std::optional<DemandParams> theta_true = std::nullopt,
                std::optional<double> q_true = std::nullopt);

  double next_price(std::int64_t t_next, double c_next,
                    const EstimatorState& est);
  void end_period(std::int64_t t, EstimatorState& est);

  PolicyKind kind() const { return kind_; }
  const PolicyConfig& config() const { return config_; }
  std::int64_t clamp_count() const { return clamp_count_; }
  bool last_clamped() const { return last_clamped_; }

 private:
  double clamp_price(double raw, double c);

  PolicyKind kind_;
  PolicyConfig config_;
  ParamBox box_;
  double c_bar_;
  std::optional<DemandParams> theta_true_;
  std::optional<double> q_true_;

  double anchor_price_ = 0.0;  // latest unclamped certainty-equivalent price
  double last_cost_ = 0.0;
  std::int64_t last_period_ = 0;
  std::int64_t clamp_count_ = 0;
  bool last_clamped_ = false;
};

}  // namespace drlab
