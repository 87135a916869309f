#pragma once

// Monte Carlo experiments: LLN moments and spectra, CLT covariances and the
// exact-oracle comparison at tiny sizes.
//
// Replica r of size s in experiment e draws only from the stream with path
// (e, s, r); row i of that replica uses (e, s, r, i). Per-replica results are
// buffered and aggregated in replica order, so every output depends on the
// configuration and seed only, never on the worker count.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bandspectra/config.hpp"
#include "bandspectra/dense.hpp"
#include "bandspectra/matrices.hpp"
#include "bandspectra/random.hpp"
#include "bandspectra/stats.hpp"

namespace bandspectra {

/// Batches behind the oracle standard errors. Many comparisons are judged at
/// |z| <= 4, so the SE must be estimated with enough degrees of freedom for z
/// to be close to normal.
inline constexpr std::size_t kOracleBatches = 100;

/// First component of every stream path.
enum class StreamTag : std::uint64_t { Lln = 1, Clt = 2, Oracle = 3 };

RandomStream replica_stream(std::uint64_t seed, StreamTag tag, std::size_t size_index, std::size_t replica);

/// Runs fn(0), ..., fn(count - 1) on up to `workers` threads. If any call
/// throws, the exception of the lowest failing index is rethrown after all
/// workers stop.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

/// One line of summary.csv. `pass` is empty for informational rows.
struct SummaryRow {
  std::string experiment;
  std::size_t p = 0;
  std::size_t n = 0;
  std::size_t b = 0;
  std::string k;
  std::string l;
  double sample_value = 0.0;
  double target_value = 0.0;
  double se = 0.0;
  double z = 0.0;
  std::optional<bool> pass;
};

struct SpectrumPanel {
  SizeSpec size;
  Histogram empirical;
  Histogram reference;
  std::string empirical_label;
  std::string reference_label;
};

struct LlnSizeReport {
  SizeSpec size;
  std::size_t replicas = 0;
  std::vector<int> k_list;
  std::vector<double> moment_mean;      // mean over replicas of p^-1 trace Y^k
  std::vector<double> moment_target;    // lln_limit(k)
  std::vector<double> moment_rel_error;
  std::vector<double> moment_variance;  // replica variance of p^-1 trace Y^k
  std::vector<double> moment_se;
  std::size_t spectrum_replicas = 0;
  std::vector<double> eigenvalues;      // pooled over the spectrum replicas
  double support_mass = 0.0;            // eigenvalue mass within radius of [min f, max f]
  double l1 = 0.0;
  std::optional<double> centered_ratio;  // mean of |Delta|_F^2 n^2 / (b p)
  double centered_ratio_se = 0.0;
  double seconds = 0.0;
};

struct CltSizeReport {
  SizeSpec size;
  std::size_t replicas = 0;
  std::vector<int> k_list;
  std::vector<double> mean_trace;  // sample mean of trace Y^k
  DenseMatrix sample_cov;          // of sqrt(n/p) (trace Y^k - mean)
  DenseMatrix target_cov;          // E G_k G_l
  DenseMatrix se;
  DenseMatrix z;
  std::vector<ShapeStats> shape;
  std::vector<double> first_scaled;  // scaled statistic for k_list[0], replica order
  double seconds = 0.0;
};

struct OracleComparison {
  SizeSpec size;
  std::vector<int> order;
  double exact = 0.0;
  double monte_carlo = 0.0;
  double se = 0.0;
  double z = 0.0;
  bool pass = false;
};

struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::Lln;
  ExperimentConfig config;
  std::vector<SummaryRow> rows;
  std::vector<SpectrumPanel> spectra;  // one per size; may be empty
  std::vector<std::string> notes;
  std::vector<LlnSizeReport> lln;
  std::vector<CltSizeReport> clt;
  std::vector<OracleComparison> oracle;

  /// Every row with a verdict passed.
  bool passed() const;
};

ExperimentReport run_lln(const ExperimentConfig& config);
ExperimentReport run_clt(const ExperimentConfig& config);
ExperimentReport run_oracle_check(const ExperimentConfig& config);
ExperimentReport run_experiment(ExperimentKind kind, const ExperimentConfig& config);

/// trace Y^1 .. trace Y^max_k of one simulated replica (no eigenvalues).
std::vector<double> replica_trace_powers(const ProcessModel& model, const SizeSpec& size, int max_k,
                                         const RandomStream& stream);

}  // namespace bandspectra
