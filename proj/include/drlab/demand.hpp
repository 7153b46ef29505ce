#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "drlab/rng.hpp"
#include "drlab/shock.hpp"

namespace drlab {

// Expected demand reduction at price p is a*p + b. Prices raise reduction,
// so a > 0 throughout.
struct DemandParams {
  double a = 0.0;
  double b = 0.0;
};

inline double lambda(double p, const DemandParams& theta) {
  return theta.a * p + theta.b;
}

// Euclidean distance between parameter vectors.
double theta_distance(const DemandParams& x, const DemandParams& y);

// Known compact parameter set [a_lo, a_hi] x [0, b_hi] that estimates are
// projected onto.
struct ParamBox {
  double a_lo = 0.0;
  double a_hi = 0.0;
  double b_hi = 0.0;

  void validate() const;
  bool contains(const DemandParams& theta) const;
  DemandParams clamp(const DemandParams& theta) const;
};

struct CustomerPopulation {
  std::vector<DemandParams> customers;
  ShockDistribution customer_shock;
  DemandParams aggregate;  // componentwise sums over customers
};

// Sampling recipe for a heterogeneous population: a_i uniform on
// [a_lo, a_hi], b_i exponential with mean b_mean conditioned on [0, b_hi],
// and a shared per-customer truncated-normal shock.
struct PopulationSpec {
  std::int64_t n = 1000;
  double a_lo = 0.04;
  double a_hi = 0.20;
  double b_mean = 0.01;
  double b_hi = 0.10;
  double shock_scale = 0.04;
  double shock_lo = -0.4;
  double shock_hi = 0.4;

  bool operator==(const PopulationSpec&) const = default;

  void validate() const;
  ParamBox box() const;  // [n*a_lo, n*a_hi] x [0, n*b_hi]
};

CustomerPopulation make_population(const PopulationSpec& spec,
                                   std::uint64_t seed);

// Retail cost c_t handed to the policy one period ahead.
class CostSequence {
 public:
  enum class Kind { kConstant, kAlternating, kSequence };

  static CostSequence constant(double value);
  // center -+ sigma/2, starting low, so |c_t - c_{t-1}| = sigma for t >= 2.
  static CostSequence alternating(double center, double sigma);
  static CostSequence sequence(std::vector<double> values);

  Kind kind() const { return kind_; }
  double cost_at(std::int64_t t) const;  // t is 1-based
  double upper_bound() const;            // c_bar

 private:
  CostSequence() = default;
  Kind kind_ = Kind::kConstant;
  double value_ = 0.0;
  double center_ = 0.0;
  double sigma_ = 0.0;
  std::vector<double> values_;
};

// Ground truth for an episode: aggregate parameters, aggregate shock law,
// and the parameter box the estimator projects onto. In population mode the
// shock is the sum of per-customer draws and theta the component sums.
struct DemandModel {
  DemandParams theta;
  ShockDistribution shock;
  ParamBox box;
  std::optional<CustomerPopulation> population;

  static DemandModel direct(DemandParams theta, ShockDistribution shock,
                            ParamBox box);
  static DemandModel from_population(const PopulationSpec& spec,
                                     std::uint64_t seed,
                                     std::int64_t oracle_samples = 10'000'000);
};

double sample_demand(const DemandModel& model, double p, Rng& rng);

// Half of max{c_bar - eps_lo/a_lo, c_bar - eps_lo/a_hi, (b_hi + eps_hi)/a_lo}:
// a bound on every price the oracle or either learning policy can post.
double price_bound(const ParamBox& box, double c_bar, double eps_lo,
                   double eps_hi);

}  // namespace drlab
