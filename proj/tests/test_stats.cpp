#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "bandspectra/error.hpp"
#include "bandspectra/stats.hpp"

using namespace bandspectra;

TEST_SUITE("stats") {
  TEST_CASE("pairwise sum") {
    CHECK(pairwise_sum({}) == 0.0);
    std::vector<double> v(1000001, 0.1);
    CHECK(std::abs(pairwise_sum(v) - 100000.1) < 1e-8);
    std::vector<double> w(40);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::sin(static_cast<double>(i)) * 1e8;
    const std::span<const double> ws(w);
    CHECK(pairwise_sum(ws) == pairwise_sum(ws.first(20)) + pairwise_sum(ws.subspan(20)));
  }

  TEST_CASE("mean, variance and covariance") {
    const std::vector<double> x{1, 2, 3, 6};
    const std::vector<double> y{0, 1, 0, 3};
    CHECK(mean(x) == 3.0);
    CHECK(sample_variance(x) == doctest::Approx(14.0 / 3.0));
    CHECK(sample_covariance(x, y) == doctest::Approx(8.0 / 3.0));
    CHECK_THROWS_AS(sample_variance(std::vector<double>{1.0}), InsufficientDataError);
    CHECK_THROWS_AS(mean(std::vector<double>{}), InsufficientDataError);
    CHECK_THROWS_AS(sample_covariance(x, std::vector<double>{1, 2}), DomainError);
  }

  TEST_CASE("shape statistics") {
    const std::vector<double> sym{-2, -1, 0, 1, 2};
    const ShapeStats s = shape_stats(sym);
    CHECK(std::abs(s.skewness) < 1e-15);
    // m2 = 2, m4 = 6.8 -> g2 = 6.8 / 4 - 3
    CHECK(s.excess_kurtosis == doctest::Approx(6.8 / 4.0 - 3.0));
    CHECK(s.se_skewness > 0.0);
    CHECK(s.se_kurtosis > 0.0);
    const std::vector<double> skewed{0, 0, 0, 1, 10};
    CHECK(shape_stats(skewed).skewness > 0.0);
    CHECK_THROWS_AS(shape_stats(std::vector<double>{1, 2, 3}), InsufficientDataError);
  }

  TEST_CASE("batched standard error tracks the true standard error of a mean") {
    std::mt19937_64 gen(1);
    std::normal_distribution<double> nd;
    const std::size_t m = 200000;
    std::vector<double> v(m);
    for (auto& x : v) x = nd(gen);
    const auto est = batched_estimate(m, kDefaultBatches, [&](std::size_t lo, std::size_t hi) {
      return mean(std::span<const double>(v).subspan(lo, hi - lo));
    });
    CHECK(est.batches == kDefaultBatches);
    CHECK(est.value == mean(v));
    const double truth = 1.0 / std::sqrt(static_cast<double>(m));
    // sd of a 20-sample sd estimate is about 16%.
    CHECK(est.se > 0.5 * truth);
    CHECK(est.se < 1.5 * truth);
    const auto tiny = batched_estimate(1, kDefaultBatches, [](std::size_t, std::size_t) { return 1.0; });
    CHECK(std::isinf(tiny.se));
  }

  TEST_CASE("z scores") {
    CHECK(z_score(3.0, 1.0, 0.5) == 4.0);
    CHECK(z_score(1.0, 1.0, 0.0) == 0.0);
    CHECK(z_score(1.0 + 1e-12, 1.0, 0.0) == 0.0);
    CHECK(z_score(1e-17, 0.0, 1e-18) == 0.0);
    CHECK(z_score(1.1, 1.0, 0.0) == std::numeric_limits<double>::infinity());
    CHECK(z_score(0.9, 1.0, 0.0) == -std::numeric_limits<double>::infinity());
    CHECK(std::isnan(z_score(1.0, 0.0, std::numeric_limits<double>::infinity())));
  }
}
