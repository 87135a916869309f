#pragma once

// Deterministic reductions and the sample statistics used by the harness.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace bandspectra {

/// Fixed-shape pairwise summation: the result depends only on the values and
/// their order, never on threading.
double pairwise_sum(std::span<const double> values) noexcept;

double mean(std::span<const double> values);
/// Unbiased (m - 1 denominator).
double sample_variance(std::span<const double> values);
double sample_covariance(std::span<const double> x, std::span<const double> y);

struct ShapeStats {
  double skewness = 0.0;         // g1 = m3 / m2^(3/2)
  double excess_kurtosis = 0.0;  // g2 = m4 / m2^2 - 3
  double se_skewness = 0.0;
  double se_kurtosis = 0.0;
};

/// Moment-ratio skewness and excess kurtosis with the usual normal-theory
/// standard errors. Requires at least 4 values.
ShapeStats shape_stats(std::span<const double> values);

inline constexpr std::size_t kDefaultBatches = 20;

struct BatchedEstimate {
  double value = 0.0;  // statistic on the full sample
  double se = 0.0;     // sd of per-batch statistics / sqrt(batches)
  std::size_t batches = 0;
};

/// Evaluates `statistic` on the full index range [0, m) and on `batches`
/// contiguous equal-size batches; the standard error comes from the spread
/// of the batch values. Batch count is reduced to m when m < batches.
BatchedEstimate batched_estimate(std::size_t m, std::size_t batches,
                                 const std::function<double(std::size_t begin, std::size_t end)>& statistic);

/// (value - target) / se. Returns 0 whenever value and target agree to
/// `exact_tol` (relative to 1 + |target|); with se == 0 and no such
/// agreement, +-infinity.
double z_score(double value, double target, double se, double exact_tol = 1e-9);

}  // namespace bandspectra
