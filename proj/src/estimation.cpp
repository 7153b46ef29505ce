#include "drlab/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "drlab/stats.hpp"

namespace drlab {

void EstimatorState::observe(double price, double demand) {
  ++t_;
  prices_.push_back(price);
  demands_.push_back(demand);
  sum_p_ += price;
  sum_pp_ += price * price;
  sum_d_ += demand;
  sum_pd_ += price * demand;
}

std::optional<DemandParams> EstimatorState::lse() const {
  if (t_ < 2) return std::nullopt;
  const auto t = static_cast<double>(t_);
  const double det = t * sum_pp_ - sum_p_ * sum_p_;
  if (det <= 1e-12 * std::max(1.0, t * sum_pp_)) return std::nullopt;
  DemandParams theta;
  theta.a = (t * sum_pd_ - sum_p_ * sum_d_) / det;
  theta.b = (sum_pp_ * sum_d_ - sum_p_ * sum_pd_) / det;
  return theta;
}

std::vector<double> EstimatorState::residuals(
    const DemandParams& theta_hat) const {
  std::vector<double> r(prices_.size());
  for (std::size_t k = 0; k < prices_.size(); ++k)
    r[k] = demands_[k] - lambda(prices_[k], theta_hat);
  return r;
}

double EstimatorState::info_min_eigenvalue() const {
  if (t_ == 0) return 0.0;
  const auto t = static_cast<double>(t_);
  const double trace = t + sum_pp_;
  const double prod = t * price_dispersion();
  const double disc = std::max(0.0, trace * trace - 4.0 * prod);
  const double lmax = 0.5 * (trace + std::sqrt(disc));
  return lmax > 0.0 ? prod / lmax : 0.0;
}

double EstimatorState::price_dispersion() const {
  if (t_ == 0) return 0.0;
  return std::max(0.0, sum_pp_ - sum_p_ * sum_p_ / static_cast<double>(t_));
}

bool EstimatorState::refresh(const ParamBox& box, double alpha) {
  if (const auto fit = lse())
    theta_hat_ = box.clamp(*fit);
  else if (!theta_hat_)
    return false;
  const auto r = residuals(*theta_hat_);
  quantile_hat_ = empirical_quantile(r, prices_, alpha);
  estimate_period_ = t_;
  return true;
}

QuantileEstimate empirical_quantile(std::span<const double> residuals,
                                    std::span<const double> prices,
                                    double alpha) {
  if (residuals.empty())
    throw std::invalid_argument("empirical quantile: no residuals");
  if (residuals.size() != prices.size())
    throw std::invalid_argument(
        "empirical quantile: residuals and prices must pair up");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("empirical quantile: alpha out of (0,1]");

  const auto t = static_cast<std::int64_t>(residuals.size());
  const auto i = quantile_index(t, alpha);
  std::vector<std::int64_t> order(residuals.size());
  std::iota(order.begin(), order.end(), 0);
  // (residual, observation index) pairs ordered lexicographically, so ties
  // between equal residuals keep observation order.
  const auto less = [&](std::int64_t x, std::int64_t y) {
    if (residuals[static_cast<std::size_t>(x)] !=
        residuals[static_cast<std::size_t>(y)])
      return residuals[static_cast<std::size_t>(x)] <
             residuals[static_cast<std::size_t>(y)];
    return x < y;
  };
  std::nth_element(order.begin(), order.begin() + (i - 1), order.end(), less);
  const auto pick = static_cast<std::size_t>(order[static_cast<std::size_t>(i - 1)]);
  return {residuals[pick], i, prices[pick]};
}

QuantileChainTerms quantile_error_chain(const DemandParams& theta_hat,
                                        const DemandParams& theta_true,
                                        const QuantileEstimate& q_hat,
                                        double q_true,
                                        double shock_quantile_empirical) {
  QuantileChainTerms terms;
  terms.lhs = std::fabs(q_hat.value - q_true);
  terms.term1 = std::fabs(shock_quantile_empirical - q_true);
  terms.term2 =
      std::hypot(1.0, q_hat.paired_price) * theta_distance(theta_hat, theta_true);
  return terms;
}

}  // namespace drlab
