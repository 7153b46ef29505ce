#include "drlab/shock.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "drlab/stats.hpp"

namespace drlab {
namespace {

constexpr std::uint64_t kOracleSeed = 0x53ED0C7A11CEULL;

double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

}  // namespace

ShockDistribution ShockDistribution::uniform(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("uniform shock: lo < hi required");
  if (hi != -lo)
    throw std::invalid_argument("uniform shock: support must be symmetric (hi = -lo)");
  ShockDistribution d;
  d.kind_ = Kind::kUniform;
  d.lo_ = lo;
  d.hi_ = hi;
  return d;
}

ShockDistribution ShockDistribution::truncated_normal(double scale, double lo,
                                                      double hi) {
  if (!(scale > 0.0))
    throw std::invalid_argument("truncated normal shock: scale > 0 required");
  if (!(lo < hi))
    throw std::invalid_argument("truncated normal shock: lo < hi required");
  if (hi != -lo)
    throw std::invalid_argument(
        "truncated normal shock: support must be symmetric (hi = -lo)");
  ShockDistribution d;
  d.kind_ = Kind::kTruncatedNormal;
  d.lo_ = lo;
  d.hi_ = hi;
  d.scale_ = scale;
  return d;
}

ShockDistribution ShockDistribution::aggregate_iid(ShockDistribution base,
                                                   std::int64_t count,
                                                   std::int64_t oracle_samples) {
  if (count < 1)
    throw std::invalid_argument("aggregate shock: count >= 1 required");
  if (oracle_samples < 1)
    throw std::invalid_argument("aggregate shock: oracle_samples >= 1 required");
  ShockDistribution d;
  d.kind_ = Kind::kAggregateIid;
  d.lo_ = static_cast<double>(count) * base.support_lo();
  d.hi_ = static_cast<double>(count) * base.support_hi();
  d.count_ = count;
  d.oracle_samples_ = oracle_samples;
  d.base_ = std::make_shared<const ShockDistribution>(std::move(base));
  d.oracle_ = std::make_shared<Oracle>();
  return d;
}

double ShockDistribution::variance() const {
  switch (kind_) {
    case Kind::kUniform: {
      const double range = hi_ - lo_;
      return range * range / 12.0;
    }
    case Kind::kTruncatedNormal: {
      const double h = hi_ / scale_;
      const double z = 2.0 * normal_cdf(h) - 1.0;
      return scale_ * scale_ * (1.0 - 2.0 * h * std_normal_pdf(h) / z);
    }
    case Kind::kAggregateIid:
      return static_cast<double>(count_) * base_->variance();
  }
  return 0.0;
}

const std::vector<double>& ShockDistribution::oracle_sorted() const {
  std::call_once(oracle_->once, [this] {
    auto* table = const_cast<Oracle*>(oracle_.get());
    table->sorted.resize(static_cast<std::size_t>(oracle_samples_));
    Rng rng(kOracleSeed);
    for (auto& x : table->sorted) x = sample(rng);
    std::sort(table->sorted.begin(), table->sorted.end());
  });
  return oracle_->sorted;
}

double ShockDistribution::cdf(double x) const {
  switch (kind_) {
    case Kind::kUniform:
      if (x <= lo_) return 0.0;
      if (x >= hi_) return 1.0;
      return (x - lo_) / (hi_ - lo_);
    case Kind::kTruncatedNormal: {
      if (x <= lo_) return 0.0;
      if (x >= hi_) return 1.0;
      const double flo = normal_cdf(lo_ / scale_);
      const double fhi = normal_cdf(hi_ / scale_);
      return (normal_cdf(x / scale_) - flo) / (fhi - flo);
    }
    case Kind::kAggregateIid: {
      const auto& tab = oracle_sorted();
      const auto it = std::upper_bound(tab.begin(), tab.end(), x);
      return static_cast<double>(it - tab.begin()) /
             static_cast<double>(tab.size());
    }
  }
  return 0.0;
}

double ShockDistribution::quantile(double alpha) const {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("shock quantile: alpha out of (0,1)");
  switch (kind_) {
    case Kind::kUniform:
      return lo_ + alpha * (hi_ - lo_);
    case Kind::kTruncatedNormal: {
      const double flo = normal_cdf(lo_ / scale_);
      const double fhi = normal_cdf(hi_ / scale_);
      const double x = scale_ * normal_quantile(flo + alpha * (fhi - flo));
      return std::clamp(x, lo_, hi_);
    }
    case Kind::kAggregateIid: {
      const auto& tab = oracle_sorted();
      const auto i = quantile_index(static_cast<std::int64_t>(tab.size()), alpha);
      return tab[static_cast<std::size_t>(i - 1)];
    }
  }
  return 0.0;
}

double ShockDistribution::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::kUniform:
      return rng.uniform(lo_, hi_);
    case Kind::kTruncatedNormal: {
      const double flo = normal_cdf(lo_ / scale_);
      const double fhi = normal_cdf(hi_ / scale_);
      const double u = flo + rng.uniform01() * (fhi - flo);
      return std::clamp(scale_ * normal_quantile(u), lo_, hi_);
    }
    case Kind::kAggregateIid: {
      double sum = 0.0;
      for (std::int64_t i = 0; i < count_; ++i) sum += base_->sample(rng);
      return sum;
    }
  }
  return 0.0;
}

std::optional<double> ShockDistribution::bilipschitz_constant() const {
  switch (kind_) {
    case Kind::kUniform: {
      const double f = 1.0 / (hi_ - lo_);
      return std::max(f, 1.0 / f);
    }
    case Kind::kTruncatedNormal: {
      const double h = hi_ / scale_;
      const double z = 2.0 * normal_cdf(h) - 1.0;
      const double f_max = std_normal_pdf(0.0) / (scale_ * z);
      const double f_min = std_normal_pdf(h) / (scale_ * z);
      return std::max(f_max, 1.0 / f_min);
    }
    case Kind::kAggregateIid:
      return std::nullopt;
  }
  return std::nullopt;
}

double ShockDistribution::normal_approx_quantile(double alpha) const {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("shock quantile: alpha out of (0,1)");
  return std::sqrt(variance()) * normal_quantile(alpha);
}

}  // namespace drlab
