#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <span>
#include <vector>

namespace drlab {

// Standard normal CDF.
double normal_cdf(double x);

// Standard normal quantile, Wichura's PPND16 rational approximation.
// Accurate to ~1e-15 over (0, 1); returns +-inf at the endpoints.
double normal_quantile(double p);

// 1-based order-statistic index for level alpha out of t samples:
// the smallest i with i >= t*alpha. A small slack absorbs rounding in
// the product so that alpha = k/t lands exactly on k.
std::int64_t quantile_index(std::int64_t t, double alpha);

// Welford accumulator.
class RunningStat {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double sample_variance() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

// Ordinary least squares fit of y on x. Requires at least two distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Streaming order statistic: after n pushes, value() is the
// quantile_index(n, alpha)-th smallest of everything pushed so far.
class QuantileTracker {
 public:
  explicit QuantileTracker(double alpha) : alpha_(alpha) {}

  void push(double x);
  double value() const;  // requires count() >= 1
  std::int64_t count() const { return n_; }

 private:
  double alpha_;
  std::int64_t n_ = 0;
  std::priority_queue<double> lower_;  // the i smallest values
  std::priority_queue<double, std::vector<double>, std::greater<>> upper_;
};

}  // namespace drlab
