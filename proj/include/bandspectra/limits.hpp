#pragma once

// Closed-form large-p limits: moments of nu_Z (the LLN targets), the
// covariance of the Gaussian limit of sqrt(n/p) (trace Y^k - E trace Y^k),
// and the reference histogram of nu_Z.

#include <iosfwd>
#include <vector>

#include "bandspectra/dense.hpp"
#include "bandspectra/matrices.hpp"
#include "bandspectra/process.hpp"

namespace bandspectra {

/// lim p^-1 E trace Y^k = R^(k) at lag 0 (the k-th moment of nu_Z).
double lln_limit(const ProcessModel& model, int k);

/// E G_k G_l = k l (2 R^(k+l)_0 + sum_{i,j} R^(k-1)_i Q_ij R^(l-1)_j).
/// Needs kappa_4 from the driver.
double clt_covariance(const ProcessModel& model, int k, int l);

struct LimitTable {
  int max_order = 0;                  // K
  std::vector<LagSequence> r_powers;  // R^(m), m = 0..2K
  QTable q;
  std::vector<double> nu_moments;     // index k-1, k = 1..K
  DenseMatrix clt;                    // (k-1, l-1) -> E G_k G_l

  /// (1 / kl) E G_k G_l
  double clt_scaled(int k, int l) const;
};

LimitTable build_limit_table(const ProcessModel& model, int max_order);

/// CSV with header "kind,k,l,i,j,value". Kinds: R (k = m, i = lag),
/// Q (i, j), nu (k), clt (k, l) and clt_scaled (k, l); unused fields empty.
void write_limit_csv(const LimitTable& table, std::ostream& os);

struct PsdCheck {
  double min_eigenvalue = 0.0;
  bool passed = false;  // min_eigenvalue >= -tolerance
};
inline constexpr double kPsdTolerance = 1e-9;
PsdCheck check_clt_psd(const LimitTable& table, double tolerance = kPsdTolerance);

/// f_Z at the midpoints (t + 1/2) / grid, t = 0..grid-1.
std::vector<double> spectral_density_grid(const ProcessModel& model, std::size_t grid);

inline constexpr std::size_t kDefaultReferenceGrid = 100000;

/// Histogram of f_Z over the midpoint grid, mass 1/grid per point; the
/// discretized law nu_Z. Requires grid >= 1000.
Histogram nu_reference_histogram(const ProcessModel& model, std::span<const double> edges,
                                 std::size_t grid = kDefaultReferenceGrid);

}  // namespace bandspectra
