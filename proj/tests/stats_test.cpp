#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "drlab/rng.hpp"
#include "drlab/stats.hpp"

using namespace drlab;

TEST_CASE("normal quantile inverts the cdf") {
  for (double p : {1e-9, 1e-4, 0.01, 0.1, 0.25, 0.5, 0.8, 0.975, 1.0 - 1e-6}) {
    const double x = normal_quantile(p);
    CHECK(normal_cdf(x) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  // reference values from the usual normal tables
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540).epsilon(1e-12));
  CHECK(normal_quantile(0.1) == doctest::Approx(-1.2815515655446).epsilon(1e-12));
}

TEST_CASE("quantile index is the smallest i with i >= t*alpha") {
  CHECK(quantile_index(10, 0.1) == 1);
  CHECK(quantile_index(30, 0.1) == 3);   // 30 * 0.1 must not round up to 4
  CHECK(quantile_index(3, 1.0) == 3);
  CHECK(quantile_index(4, 0.1) == 1);
  CHECK(quantile_index(5, 0.5) == 3);
  CHECK(quantile_index(7, 1e-12) == 1);
  for (std::int64_t t = 1; t <= 200; ++t)
    for (std::int64_t k = 1; k <= t; ++k)
      CHECK(quantile_index(t, static_cast<double>(k) / static_cast<double>(t)) == k);
}

TEST_CASE("running stat matches direct mean and variance") {
  RunningStat acc;
  const std::vector<double> xs{1.5, -2.0, 0.25, 4.0, 4.0, -1.0};
  double sum = 0.0;
  for (double x : xs) {
    acc.add(x);
    sum += x;
  }
  const double mean = sum / xs.size();
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  CHECK(acc.count() == 6);
  CHECK(acc.mean() == doctest::Approx(mean).epsilon(1e-14));
  CHECK(acc.sample_variance() == doctest::Approx(ss / 5.0).epsilon(1e-14));
}

TEST_CASE("line fit recovers an exact line and flags degenerate input") {
  std::vector<double> x{1, 2, 3, 4, 5}, y;
  for (double v : x) y.push_back(3.0 - 2.0 * v);
  const auto fit = fit_line(x, y);
  CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(fit.intercept == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(fit.slope_stderr == doctest::Approx(0.0).epsilon(1e-10));
  CHECK_THROWS_AS(fit_line(std::vector<double>{1.0}, std::vector<double>{1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit_line(std::vector<double>{2.0, 2.0, 2.0},
                           std::vector<double>{1.0, 2.0, 3.0}),
                  std::invalid_argument);
}

TEST_CASE("quantile tracker agrees with full sorting at every step") {
  for (double alpha : {0.1, 0.37, 0.5, 0.93}) {
    Rng rng(99);
    QuantileTracker tracker(alpha);
    std::vector<double> seen;
    for (int n = 1; n <= 400; ++n) {
      const double x = rng.uniform(-3.0, 3.0);
      tracker.push(x);
      seen.push_back(x);
      auto sorted = seen;
      std::sort(sorted.begin(), sorted.end());
      const auto i = quantile_index(n, alpha);
      CHECK(tracker.value() == sorted[static_cast<std::size_t>(i - 1)]);
    }
  }
}

TEST_CASE("substreams decorrelate and reproduce") {
  CHECK(substream_seed(42, 0) != substream_seed(42, 1));
  CHECK(substream_seed(42, 7) == substream_seed(42, 7));
  CHECK(substream_seed(42, 7) != substream_seed(43, 7));
  Rng a(substream_seed(1, 2));
  Rng b(substream_seed(1, 2));
  for (int i = 0; i < 16; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("uniform01 stays inside [0, 1)") {
  Rng rng(5);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}
