#pragma once

// Exact joint cumulants of trace powers of the banded covariance at tiny
// (p, n, b), by summing over singleton-free partitions Pi of {1..2k} with
// Pi0 v Pi1 v Pi connected:
//
//   C(tr Y^k1, ..., tr Y^kr) = sum_Pi n^(-k + #(Pi0 v Pi))
//                              sum_{Pi1-measurable j} B(j) C_Pi(j)
//
// where B(j) is the band mask over the Pi0 pairs and C_Pi(j) the product of
// joint cumulants of Z over the parts of Pi.

#include <span>
#include <vector>

#include "bandspectra/process.hpp"

namespace bandspectra {

struct OracleLimits {
  int max_total_order = 3;  // k = k1 + ... + kr
  std::size_t max_dim = 8;  // p
};
inline constexpr OracleLimits kDefaultOracleLimits{};
inline constexpr OracleLimits kLargeOracleLimits{4, 12};

/// Throws CapacityError beyond `limits`, ConfigError when the driver lacks
/// cumulants up to order 2k, DomainError on empty or non-positive orders or
/// p, n < 1.
double exact_trace_cumulant(const ProcessModel& model, std::span<const int> block_sizes, std::size_t p,
                            std::size_t n, std::size_t b, const OracleLimits& limits = kDefaultOracleLimits);

/// The same sum with the band mask dropped (B = 1); independent code path.
double exact_trace_cumulant_unmasked(const ProcessModel& model, std::span<const int> block_sizes, std::size_t p,
                                     std::size_t n, const OracleLimits& limits = kDefaultOracleLimits);

/// E trace Y^k.
double exact_mean_trace(const ProcessModel& model, int k, std::size_t p, std::size_t n, std::size_t b,
                        const OracleLimits& limits = kDefaultOracleLimits);

/// Number of partitions that pass the connectivity filter (diagnostic).
std::size_t connected_term_count(std::span<const int> block_sizes);

}  // namespace bandspectra
