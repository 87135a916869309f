#include "bandspectra/limits.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <utility>

#include "bandspectra/error.hpp"

namespace bandspectra {

namespace {

void check_order(int k, const char* what) {
  if (k < 1) throw DomainError(std::string(what) + " order must be >= 1");
}

double clt_entry(const std::vector<LagSequence>& r_powers, const QTable& q, int k, int l) {
  // Evaluate in one fixed argument order so the result is exactly symmetric.
  if (k > l) std::swap(k, l);
  const LagSequence& rk = r_powers[static_cast<std::size_t>(k - 1)];
  const LagSequence& rl = r_powers[static_cast<std::size_t>(l - 1)];
  double correction = 0.0;
  for (long i = rk.min_lag; i <= rk.max_lag(); ++i) {
    const double ri = rk(i);
    if (ri == 0.0) continue;
    for (long j = rl.min_lag; j <= rl.max_lag(); ++j) correction += ri * q(i, j) * rl(j);
  }
  const double gaussian_part = 2.0 * r_powers[static_cast<std::size_t>(k + l)](0);
  return static_cast<double>(k) * static_cast<double>(l) * (gaussian_part + correction);
}

std::vector<LagSequence> r_power_chain(const ProcessModel& model, int max_m) {
  std::vector<LagSequence> out;
  out.reserve(static_cast<std::size_t>(max_m) + 1);
  for (int m = 0; m <= max_m; ++m) out.push_back(iterated_autocovariance_sequence(model, m));
  return out;
}

}  // namespace

double lln_limit(const ProcessModel& model, int k) {
  check_order(k, "LLN limit");
  return nu_moment(model, k);
}

double clt_covariance(const ProcessModel& model, int k, int l) {
  check_order(k, "CLT covariance");
  check_order(l, "CLT covariance");
  const QTable q = q_table(model);
  return clt_entry(r_power_chain(model, k + l), q, k, l);
}

double LimitTable::clt_scaled(int k, int l) const {
  return clt(static_cast<std::size_t>(k - 1), static_cast<std::size_t>(l - 1)) / (static_cast<double>(k) * l);
}

LimitTable build_limit_table(const ProcessModel& model, int max_order) {
  check_order(max_order, "limit table");
  LimitTable t;
  t.max_order = max_order;
  t.r_powers = r_power_chain(model, 2 * max_order);
  t.q = q_table(model);
  t.nu_moments.resize(static_cast<std::size_t>(max_order));
  for (int k = 1; k <= max_order; ++k) t.nu_moments[static_cast<std::size_t>(k - 1)] = t.r_powers[k](0);
  t.clt = DenseMatrix(static_cast<std::size_t>(max_order), static_cast<std::size_t>(max_order));
  for (int k = 1; k <= max_order; ++k) {
    for (int l = 1; l <= max_order; ++l) {
      t.clt(static_cast<std::size_t>(k - 1), static_cast<std::size_t>(l - 1)) = clt_entry(t.r_powers, t.q, k, l);
    }
  }
  return t;
}

void write_limit_csv(const LimitTable& table, std::ostream& os) {
  const auto old_precision = os.precision(17);
  os << "kind,k,l,i,j,value\n";
  for (std::size_t m = 0; m < table.r_powers.size(); ++m) {
    const auto& r = table.r_powers[m];
    for (long i = r.min_lag; i <= r.max_lag(); ++i) os << "R," << m << ",," << i << ",," << r(i) << '\n';
  }
  const long lo = table.q.min_lag;
  const long hi = lo + static_cast<long>(table.q.width) - 1;
  for (long i = lo; i <= hi; ++i) {
    for (long j = lo; j <= hi; ++j) os << "Q,,," << i << ',' << j << ',' << table.q(i, j) << '\n';
  }
  for (int k = 1; k <= table.max_order; ++k) os << "nu," << k << ",,,," << table.nu_moments[k - 1] << '\n';
  for (int k = 1; k <= table.max_order; ++k) {
    for (int l = 1; l <= table.max_order; ++l) {
      os << "clt," << k << ',' << l << ",,," << table.clt(k - 1, l - 1) << '\n';
    }
  }
  for (int k = 1; k <= table.max_order; ++k) {
    for (int l = 1; l <= table.max_order; ++l) {
      os << "clt_scaled," << k << ',' << l << ",,," << table.clt_scaled(k, l) << '\n';
    }
  }
  os.precision(old_precision);
}

PsdCheck check_clt_psd(const LimitTable& table, double tolerance) {
  const auto eig = symmetric_eigenvalues(table.clt, EigenOptions{1e-14, 100});
  PsdCheck out;
  out.min_eigenvalue = eig.empty() ? 0.0 : eig.front();
  out.passed = out.min_eigenvalue >= -tolerance;
  return out;
}

std::vector<double> spectral_density_grid(const ProcessModel& model, std::size_t grid) {
  if (grid == 0) throw DomainError("spectral density grid must be non-empty");
  const LagSequence r = autocovariance_sequence(model);
  std::vector<double> f(grid);
  for (std::size_t t = 0; t < grid; ++t) {
    const double theta = (static_cast<double>(t) + 0.5) / static_cast<double>(grid);
    double v = r(0);
    for (long j = 1; j <= r.max_lag(); ++j) {
      v += 2.0 * r(j) * std::cos(2.0 * std::numbers::pi * static_cast<double>(j) * theta);
    }
    f[t] = v;
  }
  return f;
}

Histogram nu_reference_histogram(const ProcessModel& model, std::span<const double> edges, std::size_t grid) {
  if (grid < 1000) throw DomainError("reference grid must have at least 1000 points");
  const auto f = spectral_density_grid(model, grid);
  return empirical_spectral_histogram(f, edges);
}

}  // namespace bandspectra
