#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "drlab/rng.hpp"

namespace drlab {

// Zero-mean demand shock on a bounded support. Three laws:
//  - Uniform(lo, hi) with hi = -lo
//  - TruncatedNormal(scale, lo, hi): N(0, scale^2) conditioned on [lo, hi],
//    sampled by the inverse-CDF transform
//  - AggregateIid(base, count): sum of `count` iid draws of `base`; its CDF
//    and quantile are evaluated through a fixed-seed Monte Carlo table built
//    lazily on first use and shared by copies
//
// Immutable after construction; safe to share across threads.
class ShockDistribution {
 public:
  enum class Kind { kUniform, kTruncatedNormal, kAggregateIid };

  static ShockDistribution uniform(double lo, double hi);
  static ShockDistribution truncated_normal(double scale, double lo, double hi);
  static ShockDistribution aggregate_iid(ShockDistribution base,
                                         std::int64_t count,
                                         std::int64_t oracle_samples = 10'000'000);

  Kind kind() const { return kind_; }
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }
  double variance() const;

  double cdf(double x) const;
  double quantile(double alpha) const;  // alpha in (0, 1)
  double sample(Rng& rng) const;

  // max(sup density, 1 / inf density) over the support; nullopt for the
  // aggregate law, whose density has no closed form here.
  std::optional<double> bilipschitz_constant() const;

  // Quantile of the zero-mean normal with the same variance. Used as a
  // sanity cross-check against the Monte Carlo table.
  double normal_approx_quantile(double alpha) const;

  std::int64_t aggregate_count() const { return count_; }
  std::int64_t oracle_samples() const { return oracle_samples_; }

 private:
  struct Oracle {
    std::once_flag once;
    std::vector<double> sorted;
  };

  ShockDistribution() = default;
  const std::vector<double>& oracle_sorted() const;

  Kind kind_ = Kind::kUniform;
  double lo_ = 0.0;
  double hi_ = 0.0;
  double scale_ = 0.0;
  std::int64_t count_ = 1;
  std::int64_t oracle_samples_ = 0;
  std::shared_ptr<const ShockDistribution> base_;
  std::shared_ptr<Oracle> oracle_;
};

}  // namespace drlab
