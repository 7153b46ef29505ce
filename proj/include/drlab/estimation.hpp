#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "drlab/demand.hpp"

namespace drlab {

// Order statistic of the residuals together with the price that produced
// the selected observation. index is 1-based.
struct QuantileEstimate {
  double value = 0.0;
  std::int64_t index = 0;
  double paired_price = 0.0;
};

// Price/demand history with the running sums behind the closed-form least
// squares fit, plus the estimate caches the pricing policies read.
class EstimatorState {
 public:
  void observe(double price, double demand);

  std::int64_t periods() const { return t_; }
  std::span<const double> prices() const { return prices_; }
  std::span<const double> demands() const { return demands_; }
  double sum_p() const { return sum_p_; }
  double sum_pp() const { return sum_pp_; }
  double sum_d() const { return sum_d_; }
  double sum_pd() const { return sum_pd_; }

  // Closed-form fit of demand on price. Empty when the information matrix
  // is singular at the working tolerance (fewer than two distinct prices).
  std::optional<DemandParams> lse() const;

  std::vector<double> residuals(const DemandParams& theta_hat) const;

  // Smallest eigenvalue of J_t = sum over k of (p_k, 1)(p_k, 1)^T, from the
  // characteristic polynomial in a cancellation-safe form.
  double info_min_eigenvalue() const;

  // Price dispersion sum_k (p_k - mean p)^2, floored at zero.
  double price_dispersion() const;

  // Recompute the fit, project it onto the box, and take the empirical
  // alpha-quantile of the full residual sweep. Falls back to the previous
  // projected fit when the current one is singular; returns false only if
  // there is nothing to fall back to.
  bool refresh(const ParamBox& box, double alpha);

  const std::optional<DemandParams>& theta_hat() const { return theta_hat_; }
  const std::optional<QuantileEstimate>& quantile_hat() const {
    return quantile_hat_;
  }
  // Number of observations the caches were computed from.
  std::int64_t estimate_period() const { return estimate_period_; }

 private:
  std::int64_t t_ = 0;
  std::vector<double> prices_;
  std::vector<double> demands_;
  double sum_p_ = 0.0;
  double sum_pp_ = 0.0;
  double sum_d_ = 0.0;
  double sum_pd_ = 0.0;

  std::optional<DemandParams> theta_hat_;
  std::optional<QuantileEstimate> quantile_hat_;
  std::int64_t estimate_period_ = 0;
};

// i-th smallest residual with i = quantile_index(t, alpha), alpha in (0, 1].
// Ties between equal residuals resolve by observation order, and the paired
// price is the price of the selected observation.
QuantileEstimate empirical_quantile(std::span<const double> residuals,
                                    std::span<const double> prices,
                                    double alpha);

// Decomposition of the estimated-quantile error into the raw-shock quantile
// error plus the sloppiness induced by the parameter estimate:
//   lhs = |q_hat - q_true|
//   term1 = |empirical quantile of the true shocks - q_true|
//   term2 = sqrt(1 + paired_price^2) * ||theta_hat - theta_true||
// The chain inequality asserts lhs <= term1 + term2.
struct QuantileChainTerms {
  double lhs = 0.0;
  double term1 = 0.0;
  double term2 = 0.0;
};

QuantileChainTerms quantile_error_chain(const DemandParams& theta_hat,
                                        const DemandParams& theta_true,
                                        const QuantileEstimate& q_hat,
                                        double q_true,
                                        double shock_quantile_empirical);

}  // namespace drlab
