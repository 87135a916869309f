#include "bandspectra/stats.hpp"

#include <cmath>
#include <limits>

#include "bandspectra/error.hpp"

namespace bandspectra {

double pairwise_sum(std::span<const double> values) noexcept {
  constexpr std::size_t kLeaf = 16;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double mean(std::span<const double> values) {
  if (values.empty()) throw InsufficientDataError("mean of an empty sample");
  return pairwise_sum(values) / static_cast<double>(values.size());
}

double sample_covariance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("covariance of samples with different lengths");
  if (x.size() < 2) throw InsufficientDataError("covariance needs at least 2 values");
  const double mx = mean(x);
  const double my = mean(y);
  std::vector<double> prods(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) prods[i] = (x[i] - mx) * (y[i] - my);
  return pairwise_sum(prods) / static_cast<double>(x.size() - 1);
}

double sample_variance(std::span<const double> values) { return sample_covariance(values, values); }

ShapeStats shape_stats(std::span<const double> values) {
  const std::size_t m = values.size();
  if (m < 4) throw InsufficientDataError("shape statistics need at least 4 values");
  const double mu = mean(values);
  std::vector<double> d2(m), d3(m), d4(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double d = values[i] - mu;
    d2[i] = d * d;
    d3[i] = d2[i] * d;
    d4[i] = d2[i] * d2[i];
  }
  const double fm = static_cast<double>(m);
  const double m2 = pairwise_sum(d2) / fm;
  const double m3 = pairwise_sum(d3) / fm;
  const double m4 = pairwise_sum(d4) / fm;
  ShapeStats s;
  if (m2 > 0.0) {
    s.skewness = m3 / std::pow(m2, 1.5);
    s.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  } else {
    s.skewness = std::numeric_limits<double>::quiet_NaN();
    s.excess_kurtosis = std::numeric_limits<double>::quiet_NaN();
  }
  s.se_skewness = std::sqrt(6.0 * fm * (fm - 1.0) / ((fm - 2.0) * (fm + 1.0) * (fm + 3.0)));
  s.se_kurtosis = 2.0 * s.se_skewness * std::sqrt((fm * fm - 1.0) / ((fm - 3.0) * (fm + 5.0)));
  return s;
}

BatchedEstimate batched_estimate(std::size_t m, std::size_t batches,
                                 const std::function<double(std::size_t, std::size_t)>& statistic) {
  if (m == 0) throw InsufficientDataError("batched estimate of an empty sample");
  BatchedEstimate out;
  out.value = statistic(0, m);
  out.batches = std::min(batches, m);
  if (out.batches < 2) {
    out.se = std::numeric_limits<double>::infinity();
    return out;
  }
  std::vector<double> per_batch(out.batches);
  for (std::size_t b = 0; b < out.batches; ++b) {
    const std::size_t begin = b * m / out.batches;
    const std::size_t end = (b + 1) * m / out.batches;
    per_batch[b] = statistic(begin, end);
  }
  out.se = std::sqrt(sample_variance(per_batch) / static_cast<double>(out.batches));
  return out;
}

double z_score(double value, double target, double se, double exact_tol) {
  const double diff = value - target;
  if (std::isinf(se)) return std::numeric_limits<double>::quiet_NaN();
  // Agreement to rounding is exact agreement, whatever the SE: a deterministic
  // statistic has an SE made of rounding noise only.
  if (std::abs(diff) <= exact_tol * (1.0 + std::abs(target))) return 0.0;
  if (se > 0.0) return diff / se;
  return diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

}  // namespace bandspectra
