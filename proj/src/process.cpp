#include "bandspectra/process.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bandspectra/error.hpp"
#include "bandspectra/random.hpp"
#include "bandspectra/simd/kernels.hpp"

namespace bandspectra {

std::string_view family_name(DriverFamily family) noexcept {
  switch (family) {
    case DriverFamily::Gaussian:
      return "gaussian";
    case DriverFamily::Rademacher:
      return "rademacher";
    case DriverFamily::Uniform:
      return "uniform";
    case DriverFamily::CenteredExponential:
      return "centered-exponential";
    case DriverFamily::Custom:
      return "custom";
  }
  return "unknown";
}

DriverFamily parse_family(std::string_view name) {
  for (auto f : {DriverFamily::Gaussian, DriverFamily::Rademacher, DriverFamily::Uniform,
                 DriverFamily::CenteredExponential, DriverFamily::Custom}) {
    if (family_name(f) == name) return f;
  }
  throw ConfigError("unknown driver family '" + std::string(name) + "'");
}

namespace {

// Even cumulants of a +-1 coin: (2m-1)! times the t^(2m-1) coefficient of tanh t.
constexpr double kRademacherEven[] = {1.0, -2.0, 16.0, -272.0, 7936.0, -353792.0, 22368256.0, -1903757312.0};

// B_2, B_4, ..., B_16.
constexpr double kBernoulliEven[] = {1.0 / 6.0,     -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0,
                                     5.0 / 66.0,    -691.0 / 2730.0, 7.0 / 6.0, -3617.0 / 510.0};

std::vector<double> named_cumulants(DriverFamily family, double scale) {
  constexpr int order = DriverSpec::kNamedFamilyOrder;
  std::vector<double> k(order, 0.0);
  switch (family) {
    case DriverFamily::Gaussian:
      k[1] = scale * scale;
      break;
    case DriverFamily::Rademacher:
      for (int m = 1; 2 * m <= order; ++m) k[2 * m - 1] = kRademacherEven[m - 1] * std::pow(scale, 2 * m);
      break;
    case DriverFamily::Uniform: {
      // U(-a, a): kappa_2m = B_2m (2a)^2m / (2m).
      const double width = 2.0 * std::sqrt(3.0) * scale;
      for (int m = 1; 2 * m <= order; ++m) k[2 * m - 1] = kBernoulliEven[m - 1] * std::pow(width, 2 * m) / (2 * m);
      break;
    }
    case DriverFamily::CenteredExponential: {
      double fact = 1.0;  // (r-1)!
      for (int r = 2; r <= order; ++r) {
        fact *= (r - 1);
        k[r - 1] = fact * std::pow(scale, r);
      }
      break;
    }
    case DriverFamily::Custom:
      throw ConfigError("custom drivers need an explicit cumulant list");
  }
  return k;
}

}  // namespace

DriverSpec::DriverSpec(DriverFamily family, double scale, std::vector<double> cumulants)
    : family_(family), scale_(scale), cumulants_(std::move(cumulants)) {
  if (cumulants_.size() < 2) throw ConfigError("driver needs cumulants up to order 2 at least");
  if (cumulants_[0] != 0.0) throw ConfigError("driver must be centered (kappa_1 = 0)");
  if (!(cumulants_[1] > 0.0)) throw ConfigError("driver variance kappa_2 must be positive");
  for (double c : cumulants_) {
    if (!std::isfinite(c)) throw ConfigError("driver cumulants must be finite");
  }
}

DriverSpec DriverSpec::named(DriverFamily family, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("driver scale must be positive");
  return DriverSpec(family, scale, named_cumulants(family, scale));
}

DriverSpec DriverSpec::gaussian(double sigma) { return named(DriverFamily::Gaussian, sigma); }
DriverSpec DriverSpec::rademacher(double scale) { return named(DriverFamily::Rademacher, scale); }
DriverSpec DriverSpec::uniform(double scale) { return named(DriverFamily::Uniform, scale); }
DriverSpec DriverSpec::centered_exponential(double scale) { return named(DriverFamily::CenteredExponential, scale); }

DriverSpec DriverSpec::custom(std::vector<double> cumulants) {
  return DriverSpec(DriverFamily::Custom, 1.0, std::move(cumulants));
}

double DriverSpec::cumulant(int r) const {
  if (r < 1) throw DomainError("cumulant order must be positive");
  if (r > max_order()) {
    throw ConfigError("driver supplies cumulants up to order " + std::to_string(max_order()) + ", order " +
                      std::to_string(r) + " requested");
  }
  return cumulants_[r - 1];
}

double DriverSpec::sample(RandomStream& stream) const {
  switch (family_) {
    case DriverFamily::Gaussian:
      return scale_ * stream.normal();
    case DriverFamily::Rademacher:
      return scale_ * stream.rademacher();
    case DriverFamily::Uniform:
      return scale_ * std::sqrt(3.0) * (2.0 * stream.uniform() - 1.0);
    case DriverFamily::CenteredExponential:
      return scale_ * (-std::log1p(-stream.uniform()) - 1.0);
    case DriverFamily::Custom:
      break;
  }
  throw ConfigError("custom drivers are specified by cumulants only and cannot be sampled");
}

DriverSpec DriverSpec::scaled(double c) const {
  if (family_ != DriverFamily::Custom) return named(family_, scale_ * c);
  auto k = cumulants_;
  for (std::size_t r = 0; r < k.size(); ++r) k[r] *= std::pow(c, static_cast<double>(r + 1));
  return custom(std::move(k));
}

Kernel::Kernel(long min_offset, std::vector<double> coeffs) : min_offset_(min_offset), coeffs_(std::move(coeffs)) {
  // Trim zero ends so min/max offsets describe the true support.
  std::size_t lo = 0;
  while (lo < coeffs_.size() && coeffs_[lo] == 0.0) ++lo;
  if (lo == coeffs_.size()) throw ConfigError("kernel must have at least one nonzero coefficient");
  std::size_t hi = coeffs_.size();
  while (coeffs_[hi - 1] == 0.0) --hi;
  coeffs_ = std::vector<double>(coeffs_.begin() + lo, coeffs_.begin() + hi);
  min_offset_ += static_cast<long>(lo);
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw ConfigError("kernel coefficients must be finite");
  }
}

Kernel Kernel::from_pairs(const std::vector<std::pair<long, double>>& pairs) {
  std::map<long, double> m;
  for (const auto& [off, val] : pairs) {
    if (m.count(off)) throw ConfigError("kernel offset " + std::to_string(off) + " given twice");
    m[off] = val;
  }
  return from_map(m);
}

Kernel Kernel::from_map(const std::map<long, double>& coefficients) {
  if (coefficients.empty()) throw ConfigError("kernel support must be non-empty");
  const long lo = coefficients.begin()->first;
  const long hi = coefficients.rbegin()->first;
  constexpr long kMaxSupport = 1 << 16;
  if (hi - lo >= kMaxSupport) throw ConfigError("kernel support too wide");
  std::vector<double> dense(static_cast<std::size_t>(hi - lo + 1), 0.0);
  for (const auto& [off, val] : coefficients) dense[static_cast<std::size_t>(off - lo)] = val;
  return Kernel(lo, std::move(dense));
}

Kernel Kernel::impulse() { return Kernel(0, {1.0}); }

Kernel Kernel::ma1(double theta) { return from_pairs({{0, 1.0}, {1, theta}}); }

double Kernel::operator()(long offset) const noexcept {
  const long t = offset - min_offset_;
  if (t < 0 || t >= static_cast<long>(coeffs_.size())) return 0.0;
  return coeffs_[static_cast<std::size_t>(t)];
}

Kernel Kernel::scaled(double c) const {
  auto k = coeffs_;
  for (auto& v : k) v *= c;
  return Kernel(min_offset_, std::move(k));
}

double LagSequence::operator()(long lag) const noexcept {
  const long t = lag - min_lag;
  if (t < 0 || t >= static_cast<long>(values.size())) return 0.0;
  return values[static_cast<std::size_t>(t)];
}

ProcessModel::ProcessModel(Kernel kernel, DriverSpec driver) : kernel_(std::move(kernel)), driver_(std::move(driver)) {}

ProcessModel ProcessModel::with_kernel_scaled(double c) const { return ProcessModel(kernel_.scaled(c), driver_); }

std::string ProcessModel::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "kernel{";
  bool first = true;
  for (long off = kernel_.min_offset(); off <= kernel_.max_offset(); ++off) {
    if (kernel_(off) == 0.0) continue;
    os << (first ? "" : ",") << off << ':' << kernel_(off);
    first = false;
  }
  os << "} driver=" << family_name(driver_.family());
  if (driver_.family() == DriverFamily::Custom) {
    os << '[';
    for (std::size_t r = 0; r < driver_.cumulants().size(); ++r) os << (r ? "," : "") << driver_.cumulants()[r];
    os << ']';
  } else {
    os << '(' << driver_.scale() << ')';
  }
  return os.str();
}

double autocovariance(const ProcessModel& model, long lag) {
  const Kernel& h = model.kernel();
  const long a = std::abs(lag);
  if (a > h.diameter()) return 0.0;
  double s = 0.0;
  for (long l = h.min_offset(); l + a <= h.max_offset(); ++l) s += h(l) * h(l + a);
  return model.driver().cumulant(2) * s;
}

LagSequence autocovariance_sequence(const ProcessModel& model) {
  const long d = model.kernel().diameter();
  LagSequence r{-d, std::vector<double>(static_cast<std::size_t>(2 * d + 1))};
  for (long j = -d; j <= d; ++j) r.values[static_cast<std::size_t>(j + d)] = autocovariance(model, j);
  return r;
}

double spectral_density(const ProcessModel& model, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw DomainError("spectral_density: theta must lie in [0, 1]");
  double f = autocovariance(model, 0);
  for (long j = 1; j <= model.kernel().diameter(); ++j) {
    f += 2.0 * autocovariance(model, j) * std::cos(2.0 * std::numbers::pi * static_cast<double>(j) * theta);
  }
  return f;
}

LagSequence iterated_autocovariance_sequence(const ProcessModel& model, int m) {
  if (m < 0) throw DomainError("convolution power must be non-negative");
  const LagSequence r = autocovariance_sequence(model);
  LagSequence acc{0, {1.0}};
  for (int step = 0; step < m; ++step) {
    LagSequence next{acc.min_lag + r.min_lag, std::vector<double>(acc.values.size() + r.values.size() - 1, 0.0)};
    for (std::size_t a = 0; a < acc.values.size(); ++a) {
      for (std::size_t b = 0; b < r.values.size(); ++b) next.values[a + b] += acc.values[a] * r.values[b];
    }
    acc = std::move(next);
  }
  return acc;
}

double iterated_autocovariance(const ProcessModel& model, int m, long lag) {
  return iterated_autocovariance_sequence(model, m)(lag);
}

double q_coefficient(const ProcessModel& model, long i, long j) {
  const double k4 = model.driver().cumulant(4);
  const Kernel& h = model.kernel();
  double s = 0.0;
  for (long m = h.min_offset(); m <= h.max_offset(); ++m) {
    const double left = h(i + m) * h(m);
    if (left == 0.0) continue;
    for (long lm = h.min_offset(); lm <= h.max_offset(); ++lm) {  // lm = l + m
      s += left * h(j + lm) * h(lm);
    }
  }
  return k4 * s;
}

double QTable::operator()(long i, long j) const noexcept {
  const long ti = i - min_lag;
  const long tj = j - min_lag;
  if (ti < 0 || tj < 0 || ti >= static_cast<long>(width) || tj >= static_cast<long>(width)) return 0.0;
  return values[static_cast<std::size_t>(ti) * width + static_cast<std::size_t>(tj)];
}

QTable q_table(const ProcessModel& model) {
  const long d = model.kernel().diameter();
  QTable q{-d, static_cast<std::size_t>(2 * d + 1), {}};
  q.values.resize(q.width * q.width);
  for (long i = -d; i <= d; ++i) {
    for (long j = -d; j <= d; ++j) {
      q.values[static_cast<std::size_t>(i + d) * q.width + static_cast<std::size_t>(j + d)] = q_coefficient(model, i, j);
    }
  }
  return q;
}

double nu_moment(const ProcessModel& model, int k) {
  if (k < 1) throw DomainError("nu_moment order must be positive");
  return iterated_autocovariance(model, k, 0);
}

void simulate_row(const ProcessModel& model, std::size_t n, RandomStream& row_stream, std::span<double> out,
                  std::vector<double>& scratch) {
  const Kernel& h = model.kernel();
  const std::size_t p = out.size();
  const std::size_t d = static_cast<std::size_t>(h.diameter());
  scratch.resize(p + d);
  const DriverSpec& driver = model.driver();
  for (auto& u : scratch) u = driver.sample(row_stream);
  std::fill(out.begin(), out.end(), 0.0);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  const std::span<const double> u(scratch);
  for (long s = h.min_offset(); s <= h.max_offset(); ++s) {
    const double coef = h(s);
    if (coef == 0.0) continue;
    simd::axpy(out, coef * inv_sqrt_n, u.subspan(static_cast<std::size_t>(h.max_offset() - s), p));
  }
}

DenseMatrix simulate_data_matrix(const ProcessModel& model, std::size_t n, std::size_t p, const RandomStream& stream) {
  if (n == 0 || p == 0) throw DomainError("simulate_data_matrix needs n, p >= 1");
  if (!model.driver().can_sample()) throw ConfigError("custom drivers cannot be simulated");
  DenseMatrix x(n, p);
  std::vector<double> scratch;
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream row_stream = stream.substream(i);
    simulate_row(model, n, row_stream, x.row(i), scratch);
  }
  return x;
}

}  // namespace bandspectra
