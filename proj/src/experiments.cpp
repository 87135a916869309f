#include "bandspectra/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "bandspectra/cumulants.hpp"
#include "bandspectra/error.hpp"
#include "bandspectra/limits.hpp"
#include "bandspectra/oracle.hpp"

namespace bandspectra {

RandomStream replica_stream(std::uint64_t seed, StreamTag tag, std::size_t size_index, std::size_t replica) {
  return RandomStream(seed).substream({static_cast<std::uint64_t>(tag), size_index, replica});
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex failure_mutex;
  std::size_t failed_index = std::numeric_limits<std::size_t>::max();
  std::exception_ptr failure;
  auto work = [&] {
    while (!stop.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
        stop = true;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work);
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

bool ExperimentReport::passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const SummaryRow& r) { return r.pass.value_or(true); });
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

BandedMatrix simulate_covariance(const ProcessModel& model, const SizeSpec& size, const RandomStream& stream) {
  BandedGramAccumulator acc(size.p, size.b);
  std::vector<double> row(size.p);
  std::vector<double> scratch;
  for (std::size_t i = 0; i < size.n; ++i) {
    RandomStream row_stream = stream.substream(i);
    simulate_row(model, size.n, row_stream, row, scratch);
    acc.add_row(row);
  }
  return acc.take();
}

std::string int_text(int v) { return std::to_string(v); }

// Pads [lo, hi] by 5% of its width (or by 0.5 when it is a single point).
std::vector<double> padded_edges(double lo, double hi, std::size_t bins) {
  const double width = hi - lo;
  const double pad = width > 0.0 ? 0.05 * width : 0.5;
  return uniform_edges(lo - pad, hi + pad, bins);
}

std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t c) {
  std::vector<double> out(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) out[r] = rows[r][c];
  return out;
}

void add_decreasing_trend(ExperimentReport& report, const std::string& name, const std::string& k,
                          const std::vector<SizeSpec>& sizes, const std::vector<double>& values) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    SummaryRow row;
    row.experiment = name;
    row.p = sizes[i].p;
    row.n = sizes[i].n;
    row.b = sizes[i].b;
    row.k = k;
    row.sample_value = values[i];
    row.target_value = values[i - 1];
    row.se = std::numeric_limits<double>::quiet_NaN();
    row.z = std::numeric_limits<double>::quiet_NaN();
    row.pass = values[i] < values[i - 1];
    report.rows.push_back(row);
  }
}

struct LlnReplica {
  std::vector<double> traces;  // trace Y^1 .. trace Y^K
  std::vector<double> eigenvalues;
  double centered_ratio = 0.0;
};

}  // namespace

std::vector<double> replica_trace_powers(const ProcessModel& model, const SizeSpec& size, int max_k,
                                         const RandomStream& stream) {
  return trace_powers(simulate_covariance(model, size, stream), max_k);
}

ExperimentReport run_lln(const ExperimentConfig& config) {
  require_valid(config, ExperimentKind::Lln);
  ExperimentReport report;
  report.kind = ExperimentKind::Lln;
  report.config = config;
  const ProcessModel& model = config.model;
  const int max_k = config.max_k();
  const auto density = spectral_density_grid(model, kDefaultReferenceGrid);
  const auto [f_min_it, f_max_it] = std::minmax_element(density.begin(), density.end());
  const double f_min = *f_min_it;
  const double f_max = *f_max_it;
  const bool point_mass = model.kernel().diameter() == 0;

  for (std::size_t s = 0; s < config.sizes.size(); ++s) {
    const SizeSpec& size = config.sizes[s];
    const auto start = Clock::now();
    const std::size_t m = config.replicas_for(size);
    const std::size_t spectral = std::min(m, config.spectrum_replicas);
    std::vector<LlnReplica> results(m);
    parallel_for(m, config.workers, [&](std::size_t r) {
      const RandomStream stream = replica_stream(config.seed, StreamTag::Lln, s, r);
      LlnReplica& out = results[r];
      BandedMatrix y;
      if (config.centered) {
        const DenseMatrix x = simulate_data_matrix(model, size.n, size.p, stream);
        y = banded_covariance(x, size.b);
        const CenteredCovariance cc = centered_banded_covariance(x, size.b);
        const double n = static_cast<double>(size.n);
        out.centered_ratio = cc.perturbation.frobenius_squared() * n * n /
                             (static_cast<double>(size.b) * static_cast<double>(size.p));
      } else {
        y = simulate_covariance(model, size, stream);
      }
      out.traces = trace_powers(y, max_k);
      if (r < spectral) out.eigenvalues = symmetric_eigenvalues(y);
    });

    LlnSizeReport sr;
    sr.size = size;
    sr.replicas = m;
    sr.k_list = config.k_list;
    sr.spectrum_replicas = spectral;
    const double p = static_cast<double>(size.p);
    for (int k : config.k_list) {
      std::vector<double> v(m);
      for (std::size_t r = 0; r < m; ++r) v[r] = results[r].traces[static_cast<std::size_t>(k - 1)] / p;
      const double mu = mean(v);
      const double var = m > 1 ? sample_variance(v) : 0.0;
      const double target = lln_limit(model, k);
      const double se = m > 1 ? std::sqrt(var / static_cast<double>(m)) : std::numeric_limits<double>::infinity();
      sr.moment_mean.push_back(mu);
      sr.moment_target.push_back(target);
      sr.moment_rel_error.push_back(std::abs(mu / target - 1.0));
      sr.moment_variance.push_back(var);
      sr.moment_se.push_back(se);

      SummaryRow row{"lln_moment", size.p, size.n, size.b, int_text(k), "", mu, target, se, z_score(mu, target, se), {}};
      row.pass = sr.moment_rel_error.back() <= config.tolerances.lln_rel;
      report.rows.push_back(row);
      SummaryRow var_row{"lln_variance", size.p, size.n, size.b, int_text(k), "", var, 0.0,
                         m > 1 ? var * std::sqrt(2.0 / static_cast<double>(m - 1)) : 0.0,
                         std::numeric_limits<double>::quiet_NaN(), {}};
      report.rows.push_back(var_row);
    }
    for (std::size_t r = 0; r < spectral; ++r) {
      sr.eigenvalues.insert(sr.eigenvalues.end(), results[r].eigenvalues.begin(), results[r].eigenvalues.end());
    }
    if (!sr.eigenvalues.empty()) {
      const double radius = config.tolerances.support_radius;
      std::size_t near = 0;
      for (double e : sr.eigenvalues) near += (e >= f_min - radius && e <= f_max + radius) ? 1 : 0;
      sr.support_mass = static_cast<double>(near) / static_cast<double>(sr.eigenvalues.size());
    }
    if (config.centered) {
      std::vector<double> ratios(m);
      for (std::size_t r = 0; r < m; ++r) ratios[r] = results[r].centered_ratio;
      sr.centered_ratio = mean(ratios);
      sr.centered_ratio_se = m > 1 ? std::sqrt(sample_variance(ratios) / static_cast<double>(m)) : 0.0;
      report.rows.push_back({"centered_delta", size.p, size.n, size.b, "", "", *sr.centered_ratio, 0.0,
                             sr.centered_ratio_se, std::numeric_limits<double>::quiet_NaN(), {}});
    }
    sr.seconds = seconds_since(start);
    report.lln.push_back(std::move(sr));
  }

  // Spectra: one set of edges for the whole run so distances compare across sizes.
  bool any_spectrum = false;
  double lo = f_min;
  double hi = f_max;
  for (const auto& sr : report.lln) {
    if (sr.eigenvalues.empty()) continue;
    any_spectrum = true;
    const auto [a, b] = std::minmax_element(sr.eigenvalues.begin(), sr.eigenvalues.end());
    lo = std::min(lo, *a);
    hi = std::max(hi, *b);
  }
  if (any_spectrum) {
    const auto edges = padded_edges(lo, hi, config.bins);
    const Histogram reference = empirical_spectral_histogram(density, edges);
    std::vector<double> l1_values;
    std::vector<SizeSpec> l1_sizes;
    for (auto& sr : report.lln) {
      if (sr.eigenvalues.empty()) continue;
      Histogram empirical = empirical_spectral_histogram(sr.eigenvalues, edges);
      sr.l1 = l1_distance(empirical, reference);
      l1_values.push_back(sr.l1);
      l1_sizes.push_back(sr.size);
      report.rows.push_back({"lln_hist_l1", sr.size.p, sr.size.n, sr.size.b, "", "", sr.l1, 0.0,
                             std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), {}});
      SummaryRow mass{"lln_support_mass", sr.size.p, sr.size.n, sr.size.b, "", "", sr.support_mass,
                      config.tolerances.support_mass, std::numeric_limits<double>::quiet_NaN(),
                      std::numeric_limits<double>::quiet_NaN(), {}};
      if (point_mass) mass.pass = sr.support_mass >= config.tolerances.support_mass;
      report.rows.push_back(mass);
      report.spectra.push_back({sr.size, std::move(empirical), reference, "empirical eigenvalues", "nu_Z"});
    }
    if (config.trend_checks) add_decreasing_trend(report, "lln_hist_l1_trend", "", l1_sizes, l1_values);
  } else {
    report.notes.push_back("no eigenvalues computed (spectrum_replicas = 0); histogram outputs are empty");
  }

  if (config.trend_checks) {
    for (std::size_t ki = 0; ki < config.k_list.size(); ++ki) {
      std::vector<double> vars;
      for (const auto& sr : report.lln) vars.push_back(sr.moment_variance[ki]);
      add_decreasing_trend(report, "lln_variance_trend", int_text(config.k_list[ki]), config.sizes, vars);
    }
  } else {
    report.notes.push_back("trend checks disabled");
  }
  if (config.centered && report.lln.size() > 1) {
    double mn = std::numeric_limits<double>::infinity();
    double mx = 0.0;
    for (const auto& sr : report.lln) {
      mn = std::min(mn, *sr.centered_ratio);
      mx = std::max(mx, *sr.centered_ratio);
    }
    const double spread = mx / mn;
    SummaryRow row{"centered_delta_spread", report.lln.back().size.p, report.lln.back().size.n,
                   report.lln.back().size.b, "", "", spread, config.tolerances.centered_spread,
                   std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), {}};
    row.pass = spread < config.tolerances.centered_spread;
    report.rows.push_back(row);
  }
  return report;
}

ExperimentReport run_clt(const ExperimentConfig& config) {
  require_valid(config, ExperimentKind::Clt);
  ExperimentReport report;
  report.kind = ExperimentKind::Clt;
  report.config = config;
  report.notes.push_back("statistics are centered by the cross-replica sample mean of trace Y^k");
  report.notes.push_back("target_value is E G_k G_l = k l (2 R0^(k+l) + sum_ij R_i^(k-1) Q_ij R_j^(l-1))");
  const ProcessModel& model = config.model;
  const int max_k = config.max_k();
  const LimitTable limits = build_limit_table(model, max_k);
  const std::size_t kn = config.k_list.size();
  const Tolerances& tol = config.tolerances;

  for (std::size_t s = 0; s < config.sizes.size(); ++s) {
    const SizeSpec& size = config.sizes[s];
    const auto start = Clock::now();
    const std::size_t m = config.replicas_for(size);
    std::vector<std::vector<double>> traces(m);
    parallel_for(m, config.workers, [&](std::size_t r) {
      traces[r] = replica_trace_powers(model, size, max_k, replica_stream(config.seed, StreamTag::Clt, s, r));
    });

    CltSizeReport cr;
    cr.size = size;
    cr.replicas = m;
    cr.k_list = config.k_list;
    cr.sample_cov = DenseMatrix(kn, kn);
    cr.target_cov = DenseMatrix(kn, kn);
    cr.se = DenseMatrix(kn, kn);
    cr.z = DenseMatrix(kn, kn);
    const double scale = std::sqrt(static_cast<double>(size.n) / static_cast<double>(size.p));
    std::vector<std::vector<double>> scaled(kn);
    for (std::size_t a = 0; a < kn; ++a) {
      const auto raw = column(traces, static_cast<std::size_t>(config.k_list[a] - 1));
      const double mu = mean(raw);
      cr.mean_trace.push_back(mu);
      scaled[a].resize(m);
      for (std::size_t r = 0; r < m; ++r) scaled[a][r] = scale * (raw[r] - mu);
    }
    for (std::size_t a = 0; a < kn; ++a) {
      for (std::size_t c = a; c < kn; ++c) {
        const int k = config.k_list[a];
        const int l = config.k_list[c];
        const auto& x = scaled[a];
        const auto& y = scaled[c];
        const BatchedEstimate est = batched_estimate(m, kDefaultBatches, [&](std::size_t lo, std::size_t hi) {
          return sample_covariance(std::span(x).subspan(lo, hi - lo), std::span(y).subspan(lo, hi - lo));
        });
        const double target = limits.clt(static_cast<std::size_t>(k - 1), static_cast<std::size_t>(l - 1));
        const double z = z_score(est.value, target, est.se);
        cr.sample_cov(a, c) = cr.sample_cov(c, a) = est.value;
        cr.target_cov(a, c) = cr.target_cov(c, a) = target;
        cr.se(a, c) = cr.se(c, a) = est.se;
        cr.z(a, c) = cr.z(c, a) = z;
        SummaryRow row{"clt_cov", size.p, size.n, size.b, int_text(k), int_text(l), est.value, target, est.se, z, {}};
        if (std::abs(target) < tol.degenerate_floor) {
          row.experiment = "clt_cov_degenerate";
          row.pass = std::abs(est.value - target) <= tol.degenerate_floor;
        } else {
          row.pass = std::abs(z) <= tol.clt_z || std::abs(est.value / target - 1.0) <= tol.clt_rel;
        }
        report.rows.push_back(row);
      }
    }
    for (std::size_t a = 0; a < kn; ++a) {
      const ShapeStats sh = shape_stats(scaled[a]);
      cr.shape.push_back(sh);
      const int k = config.k_list[a];
      if (std::abs(cr.target_cov(a, a)) < tol.degenerate_floor) {
        report.notes.push_back("p=" + std::to_string(size.p) + " k=" + int_text(k) +
                               ": shape diagnostics skipped (degenerate variance)");
        continue;
      }
      const double zs = sh.skewness / sh.se_skewness;
      const double zk = sh.excess_kurtosis / sh.se_kurtosis;
      report.rows.push_back({"clt_skewness", size.p, size.n, size.b, int_text(k), "", sh.skewness, 0.0,
                             sh.se_skewness, zs, std::abs(zs) <= tol.shape_z});
      report.rows.push_back({"clt_excess_kurtosis", size.p, size.n, size.b, int_text(k), "", sh.excess_kurtosis,
                             0.0, sh.se_kurtosis, zk, std::abs(zk) <= tol.shape_z});
    }
    cr.first_scaled = scaled.front();
    cr.seconds = seconds_since(start);

    // Histogram of the first scaled statistic against its Gaussian limit.
    const double var = cr.target_cov(0, 0);
    const double sd = var > 0.0 ? std::sqrt(var) : 0.0;
    const auto [a, b] = std::minmax_element(cr.first_scaled.begin(), cr.first_scaled.end());
    const auto edges = padded_edges(std::min(*a, -4.0 * sd), std::max(*b, 4.0 * sd), config.bins);
    Histogram empirical = empirical_spectral_histogram(cr.first_scaled, edges);
    Histogram reference;
    reference.edges = edges;
    reference.mass.assign(edges.size() - 1, 0.0);
    auto cdf = [&](double t) {
      if (sd == 0.0) return t >= 0.0 ? 1.0 : 0.0;
      return 0.5 * std::erfc(-t / (sd * std::sqrt(2.0)));
    };
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) reference.mass[i] = cdf(edges[i + 1]) - cdf(edges[i]);
    reference.underflow = cdf(edges.front());
    reference.overflow = 1.0 - cdf(edges.back());
    report.spectra.push_back({size, std::move(empirical), std::move(reference),
                              "sqrt(n/p)(trace Y^" + int_text(config.k_list.front()) + " - mean)", "Gaussian limit"});
    report.clt.push_back(std::move(cr));
  }
  return report;
}

ExperimentReport run_oracle_check(const ExperimentConfig& config) {
  require_valid(config, ExperimentKind::Oracle);
  ExperimentReport report;
  report.kind = ExperimentKind::Oracle;
  report.config = config;
  const ProcessModel& model = config.model;
  const OracleLimits limits = config.allow_large ? kLargeOracleLimits : kDefaultOracleLimits;
  int max_k = 1;
  for (const auto& order : config.orders) {
    for (int k : order) max_k = std::max(max_k, k);
  }
  const std::size_t cols = static_cast<std::size_t>(max_k);

  for (std::size_t s = 0; s < config.sizes.size(); ++s) {
    const SizeSpec& size = config.sizes[s];
    // Exact values first so cap violations surface before any simulation.
    std::vector<double> exact;
    for (const auto& order : config.orders) {
      exact.push_back(exact_trace_cumulant(model, order, size.p, size.n, size.b, limits));
    }
    const std::size_t m = config.replicas_for(size);
    std::vector<double> data(m * cols);
    parallel_for(m, config.workers, [&](std::size_t r) {
      const auto t = replica_trace_powers(model, size, max_k, replica_stream(config.seed, StreamTag::Oracle, s, r));
      std::copy(t.begin(), t.end(), data.begin() + static_cast<std::ptrdiff_t>(r * cols));
    });
    for (std::size_t o = 0; o < config.orders.size(); ++o) {
      const auto& order = config.orders[o];
      std::vector<std::size_t> idx;
      for (int k : order) idx.push_back(static_cast<std::size_t>(k - 1));
      const BatchedEstimate est = batched_estimate(m, kOracleBatches, [&](std::size_t lo, std::size_t hi) {
        const SampleView view{std::span<const double>(data).subspan(lo * cols, (hi - lo) * cols), hi - lo, cols};
        return empirical_joint_cumulant(view, idx);
      });
      OracleComparison cmp;
      cmp.size = size;
      cmp.order = order;
      cmp.exact = exact[o];
      cmp.monte_carlo = est.value;
      cmp.se = est.se;
      cmp.z = z_score(est.value, exact[o], est.se);
      cmp.pass = std::abs(cmp.z) <= config.tolerances.oracle_z;
      std::string rest;
      for (std::size_t i = 1; i < order.size(); ++i) rest += (i > 1 ? ";" : "") + int_text(order[i]);
      report.rows.push_back({"oracle_cumulant", size.p, size.n, size.b, int_text(order.front()), rest, cmp.monte_carlo,
                             cmp.exact, cmp.se, cmp.z, cmp.pass});
      report.oracle.push_back(cmp);
    }
  }
  return report;
}

ExperimentReport run_experiment(ExperimentKind kind, const ExperimentConfig& config) {
  switch (kind) {
    case ExperimentKind::Lln: return run_lln(config);
    case ExperimentKind::Clt: return run_clt(config);
    case ExperimentKind::Oracle: return run_oracle_check(config);
  }
  throw DomainError("unknown experiment kind");
}

}  // namespace bandspectra
