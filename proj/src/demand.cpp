#include "drlab/demand.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drlab {

double theta_distance(const DemandParams& x, const DemandParams& y) {
  return std::hypot(x.a - y.a, x.b - y.b);
}

void ParamBox::validate() const {
  if (!(a_lo > 0.0)) throw std::invalid_argument("param box: a_lo > 0 required");
  if (!(a_hi >= a_lo))
    throw std::invalid_argument("param box: a_hi >= a_lo required");
  if (!(b_hi >= 0.0)) throw std::invalid_argument("param box: b_hi >= 0 required");
}

bool ParamBox::contains(const DemandParams& theta) const {
  return theta.a >= a_lo && theta.a <= a_hi && theta.b >= 0.0 &&
         theta.b <= b_hi;
}

DemandParams ParamBox::clamp(const DemandParams& theta) const {
  return {std::clamp(theta.a, a_lo, a_hi), std::clamp(theta.b, 0.0, b_hi)};
}

void PopulationSpec::validate() const {
  if (n < 1) throw std::invalid_argument("population: n >= 1 required");
  if (!(a_lo > 0.0))
    throw std::invalid_argument("population: a_lo > 0 required");
  if (!(a_hi >= a_lo))
    throw std::invalid_argument("population: a_hi >= a_lo required");
  if (!(b_mean > 0.0))
    throw std::invalid_argument("population: b_mean > 0 required");
  if (!(b_hi >= 0.0))
    throw std::invalid_argument("population: b_hi >= 0 required");
}

ParamBox PopulationSpec::box() const {
  const auto scale = static_cast<double>(n);
  return {scale * a_lo, scale * a_hi, scale * b_hi};
}

CustomerPopulation make_population(const PopulationSpec& spec,
                                   std::uint64_t seed) {
  spec.validate();
  CustomerPopulation pop{
      {},
      ShockDistribution::truncated_normal(spec.shock_scale, spec.shock_lo,
                                          spec.shock_hi),
      {}};
  pop.customers.reserve(static_cast<std::size_t>(spec.n));
  Rng rng(seed);
  // b_i by inverse CDF of the exponential conditioned on [0, b_hi]:
  // x = -m * log1p(v * expm1(-b_hi / m)).
  const double tail = std::expm1(-spec.b_hi / spec.b_mean);
  for (std::int64_t i = 0; i < spec.n; ++i) {
    DemandParams c;
    c.a = rng.uniform(spec.a_lo, spec.a_hi);
    c.b = -spec.b_mean * std::log1p(rng.uniform01() * tail);
    pop.customers.push_back(c);
    pop.aggregate.a += c.a;
    pop.aggregate.b += c.b;
  }
  if (!(pop.aggregate.a > 0.0))
    throw std::runtime_error("population: aggregate slope must be positive");
  return pop;
}

CostSequence CostSequence::constant(double value) {
  if (!(value >= 0.0))
    throw std::invalid_argument("cost sequence: value >= 0 required");
  CostSequence c;
  c.kind_ = Kind::kConstant;
  c.value_ = value;
  return c;
}

CostSequence CostSequence::alternating(double center, double sigma) {
  if (!(sigma >= 0.0))
    throw std::invalid_argument("cost sequence: sigma >= 0 required");
  if (!(center - sigma / 2.0 >= 0.0))
    throw std::invalid_argument("cost sequence: costs must stay nonnegative");
  CostSequence c;
  c.kind_ = Kind::kAlternating;
  c.center_ = center;
  c.sigma_ = sigma;
  return c;
}

CostSequence CostSequence::sequence(std::vector<double> values) {
  if (values.empty())
    throw std::invalid_argument("cost sequence: at least one value required");
  for (double v : values)
    if (!(v >= 0.0))
      throw std::invalid_argument("cost sequence: values must be nonnegative");
  CostSequence c;
  c.kind_ = Kind::kSequence;
  c.values_ = std::move(values);
  return c;
}

double CostSequence::cost_at(std::int64_t t) const {
  if (t < 1) throw std::out_of_range("cost sequence: period index starts at 1");
  switch (kind_) {
    case Kind::kConstant:
      return value_;
    case Kind::kAlternating:
      return t % 2 == 1 ? center_ - sigma_ / 2.0 : center_ + sigma_ / 2.0;
    case Kind::kSequence:
      if (t > static_cast<std::int64_t>(values_.size()))
        throw std::out_of_range("cost sequence exhausted at period " +
                                std::to_string(t));
      return values_[static_cast<std::size_t>(t - 1)];
  }
  return 0.0;
}

double CostSequence::upper_bound() const {
  switch (kind_) {
    case Kind::kConstant:
      return value_;
    case Kind::kAlternating:
      return center_ + sigma_ / 2.0;
    case Kind::kSequence:
      return *std::max_element(values_.begin(), values_.end());
  }
  return 0.0;
}

DemandModel DemandModel::direct(DemandParams theta, ShockDistribution shock,
                                ParamBox box) {
  box.validate();
  if (!(theta.a > 0.0))
    throw std::invalid_argument("demand model: slope a > 0 required");
  if (!box.contains(theta))
    throw std::invalid_argument("demand model: theta outside its param box");
  return {theta, std::move(shock), box, std::nullopt};
}

DemandModel DemandModel::from_population(const PopulationSpec& spec,
                                         std::uint64_t seed,
                                         std::int64_t oracle_samples) {
  auto pop = make_population(spec, seed);
  DemandModel m{pop.aggregate,
                ShockDistribution::aggregate_iid(pop.customer_shock, spec.n,
                                                 oracle_samples),
                spec.box(), std::nullopt};
  m.population = std::move(pop);
  return m;
}

double sample_demand(const DemandModel& model, double p, Rng& rng) {
  return lambda(p, model.theta) + model.shock.sample(rng);
}

double price_bound(const ParamBox& box, double c_bar, double eps_lo,
                   double eps_hi) {
  box.validate();
  if (!(c_bar >= 0.0))
    throw std::invalid_argument("price bound: c_bar >= 0 required");
  if (!(eps_lo <= 0.0 && eps_hi >= 0.0))
    throw std::invalid_argument("price bound: shock support must straddle 0");
  const double m = std::max({c_bar - eps_lo / box.a_lo,
                             c_bar - eps_lo / box.a_hi,
                             (box.b_hi + eps_hi) / box.a_lo});
  return 0.5 * m;
}

}  // namespace drlab
