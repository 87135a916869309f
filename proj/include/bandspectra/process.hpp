#pragma once

// Stationary linear processes Z_j = sum_l h(j + l) W_l with a finitely
// supported kernel h and i.i.d. centered driver W: exact second- and
// fourth-order structure and simulation of i.i.d. rows.

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bandspectra/dense.hpp"

namespace bandspectra {

class RandomStream;

enum class DriverFamily { Gaussian, Rademacher, Uniform, CenteredExponential, Custom };

std::string_view family_name(DriverFamily family) noexcept;
DriverFamily parse_family(std::string_view name);

/// The innovation law, described by its cumulant sequence kappa_1..kappa_max.
/// Named families carry analytic cumulants up to kNamedFamilyOrder and a
/// sampler; `scale` multiplies the variable (kappa_r scales by scale^r).
///   gaussian:              N(0, scale^2)
///   rademacher:            scale * (+-1)
///   uniform:               scale * U(-sqrt 3, sqrt 3)   (unit variance)
///   centered-exponential:  scale * (Exp(1) - 1)
class DriverSpec {
 public:
  static constexpr int kNamedFamilyOrder = 16;

  static DriverSpec gaussian(double sigma = 1.0);
  static DriverSpec rademacher(double scale = 1.0);
  static DriverSpec uniform(double scale = 1.0);
  static DriverSpec centered_exponential(double scale = 1.0);
  /// cumulants[r-1] = kappa_r. Requires kappa_1 = 0 and kappa_2 > 0.
  static DriverSpec custom(std::vector<double> cumulants);
  static DriverSpec named(DriverFamily family, double scale);

  DriverFamily family() const noexcept { return family_; }
  double scale() const noexcept { return scale_; }
  int max_order() const noexcept { return static_cast<int>(cumulants_.size()); }
  /// kappa_r; throws ConfigError when r exceeds max_order().
  double cumulant(int r) const;
  const std::vector<double>& cumulants() const noexcept { return cumulants_; }

  bool can_sample() const noexcept { return family_ != DriverFamily::Custom; }
  /// One draw; throws ConfigError for custom drivers.
  double sample(RandomStream& stream) const;

  /// Same law scaled by c.
  DriverSpec scaled(double c) const;

 private:
  DriverSpec(DriverFamily family, double scale, std::vector<double> cumulants);

  DriverFamily family_ = DriverFamily::Gaussian;
  double scale_ = 1.0;
  std::vector<double> cumulants_;
};

/// Finitely supported h: Z -> R, stored densely over [min_offset, max_offset].
class Kernel {
 public:
  /// Offsets may be sparse; gaps are zero. At least one coefficient must be nonzero.
  static Kernel from_pairs(const std::vector<std::pair<long, double>>& pairs);
  static Kernel from_map(const std::map<long, double>& coefficients);
  static Kernel impulse();
  /// h(0) = 1, h(1) = theta.
  static Kernel ma1(double theta);

  double operator()(long offset) const noexcept;
  long min_offset() const noexcept { return min_offset_; }
  long max_offset() const noexcept { return min_offset_ + static_cast<long>(coeffs_.size()) - 1; }
  /// max_offset - min_offset.
  long diameter() const noexcept { return static_cast<long>(coeffs_.size()) - 1; }
  const std::vector<double>& coefficients() const noexcept { return coeffs_; }
  Kernel scaled(double c) const;

 private:
  Kernel(long min_offset, std::vector<double> coeffs);

  long min_offset_ = 0;
  std::vector<double> coeffs_;
};

/// A finitely supported sequence on Z: values[t] is the value at lag min_lag + t.
struct LagSequence {
  long min_lag = 0;
  std::vector<double> values;

  long max_lag() const noexcept { return min_lag + static_cast<long>(values.size()) - 1; }
  double operator()(long lag) const noexcept;
};

class ProcessModel {
 public:
  ProcessModel(Kernel kernel, DriverSpec driver);

  const Kernel& kernel() const noexcept { return kernel_; }
  const DriverSpec& driver() const noexcept { return driver_; }
  int max_cumulant_order() const noexcept { return driver_.max_order(); }
  ProcessModel with_kernel_scaled(double c) const;

  /// Human-readable one-liner, e.g. "kernel{0:1,1:0.5} driver=gaussian(1)".
  std::string describe() const;

 private:
  Kernel kernel_;
  DriverSpec driver_;
};

/// R(j) = Cov(Z_0, Z_j) = kappa_2 * sum_l h(l) h(j + l).
double autocovariance(const ProcessModel& model, long lag);
/// R on its full support [-diameter, diameter].
LagSequence autocovariance_sequence(const ProcessModel& model);

/// f_Z(theta) = R(0) + 2 sum_{j >= 1} R(j) cos(2 pi j theta), theta in [0, 1].
double spectral_density(const ProcessModel& model, double theta);

/// m-fold convolution power of R; R^(0) is the unit impulse at lag 0.
LagSequence iterated_autocovariance_sequence(const ProcessModel& model, int m);
double iterated_autocovariance(const ProcessModel& model, int m, long lag);

/// Q_ij = kappa_4 * sum_{l, m} h(i + m) h(m) h(j + l + m) h(l + m).
double q_coefficient(const ProcessModel& model, long i, long j);

/// Q on its full support box [-d, d]^2 (d = kernel diameter), row-major in i.
struct QTable {
  long min_lag = 0;
  std::size_t width = 0;
  std::vector<double> values;

  double operator()(long i, long j) const noexcept;
};
QTable q_table(const ProcessModel& model);

/// k-th moment of nu_Z, the law of f_Z under Lebesgue measure on [0, 1]: R^(k) at lag 0.
double nu_moment(const ProcessModel& model, int k);

/// n x p matrix whose rows are independent copies of (Z_1, ..., Z_p) / sqrt(n).
/// Row i draws only from stream.substream(i): for each row the driver values
/// u_0, ..., u_{p + d - 1} (d = kernel diameter) are drawn in order, with
/// u_t = W_{max_offset - 1 - t}, so that Z_j = sum_s h(s) u_{j - 1 + max_offset - s}.
DenseMatrix simulate_data_matrix(const ProcessModel& model, std::size_t n, std::size_t p,
                                 const RandomStream& stream);

/// One row of the above into `out` (length p), using `row_stream` directly.
void simulate_row(const ProcessModel& model, std::size_t n, RandomStream& row_stream, std::span<double> out,
                  std::vector<double>& scratch);

}  // namespace bandspectra
